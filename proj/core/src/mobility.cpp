#include "scholmig/mobility.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <set>
#include <stdexcept>
#include <tuple>

#include "scholmig/csv.hpp"
#include "scholmig/error.hpp"

namespace scholmig::mobility {

namespace {

constexpr std::array<std::string_view, kLabelCount> kLabelNames{
    "SinglePaper", "NonMover", "Immigrant", "Emigrant", "ReturnMigrant", "Transient", "NonFocal"};

YearModes make_year(int year, std::vector<std::pair<Country, int>> counts) {
  YearModes ym;
  ym.year = year;
  std::sort(counts.begin(), counts.end());
  int best = 0;
  for (const auto& [c, n] : counts) best = std::max(best, n);
  for (const auto& [c, n] : counts) {
    if (n == best) ym.modes.push_back(c);
  }
  ym.counts = std::move(counts);
  return ym;
}

bool contains(const std::vector<Country>& sorted, Country c) {
  return std::binary_search(sorted.begin(), sorted.end(), c);
}

}  // namespace

bool YearModes::has_mode(Country c) const { return contains(modes, c); }

YearCountrySeries YearCountrySeries::from_dossier(const AuthorDossier& dossier) {
  std::map<int, std::map<Country, int>> by_year;
  for (const auto& r : dossier.records) {
    if (r.country.known()) ++by_year[r.year][r.country];
  }
  YearCountrySeries s;
  for (auto& [year, counts] : by_year) {
    s.years_.push_back(make_year(year, {counts.begin(), counts.end()}));
  }
  return s;
}

YearCountrySeries YearCountrySeries::from_modes(const std::vector<std::pair<int, std::vector<Country>>>& modes) {
  std::map<int, std::vector<std::pair<Country, int>>> by_year;
  for (const auto& [year, countries] : modes) {
    std::set<Country> unique(countries.begin(), countries.end());
    unique.erase(kUnknownCountry);
    if (unique.empty()) continue;
    auto& v = by_year[year];
    for (Country c : unique) v.emplace_back(c, 1);
  }
  YearCountrySeries s;
  for (auto& [year, counts] : by_year) s.years_.push_back(make_year(year, std::move(counts)));
  return s;
}

const YearModes* YearCountrySeries::find(int year) const {
  auto it = std::lower_bound(years_.begin(), years_.end(), year,
                             [](const YearModes& ym, int y) { return ym.year < y; });
  return it != years_.end() && it->year == year ? &*it : nullptr;
}

std::vector<Country> mode_countries(const AuthorDossier& dossier, int year) {
  std::map<Country, int> counts;
  for (const auto& r : dossier.records) {
    if (r.year == year && r.country.known()) ++counts[r.country];
  }
  if (counts.empty()) return {};
  return make_year(year, {counts.begin(), counts.end()}).modes;
}

std::vector<MigrationEvent> detect_events(const YearCountrySeries& series) {
  std::vector<MigrationEvent> events;
  const auto years = series.years();
  for (std::size_t i = 1; i < years.size(); ++i) {
    const auto& prev = years[i - 1];
    const auto& next = years[i];
    for (Country c : prev.modes) {
      if (next.has_mode(c)) continue;
      events.push_back({prev.year, next.year, prev.modes, next.modes, c});
    }
  }
  return events;
}

CareerAnchor academic_origin(const YearCountrySeries& series) {
  for (const auto& ym : series.years()) {
    if (ym.modes.size() == 1) return {ym.modes.front(), ym.year};
  }
  return {};
}

CareerAnchor academic_destination(const YearCountrySeries& series) {
  const auto years = series.years();
  for (auto it = years.rbegin(); it != years.rend(); ++it) {
    if (it->modes.size() == 1) return {it->modes.front(), it->year};
  }
  return {};
}

std::string_view to_string(MobilityLabel label) { return kLabelNames[static_cast<std::size_t>(label)]; }

std::optional<MobilityLabel> label_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kLabelCount; ++i) {
    if (kLabelNames[i] == name) return static_cast<MobilityLabel>(i);
  }
  return std::nullopt;
}

bool is_migrant(MobilityLabel label) {
  switch (label) {
    case MobilityLabel::kImmigrant:
    case MobilityLabel::kEmigrant:
    case MobilityLabel::kReturnMigrant:
    case MobilityLabel::kTransient:
      return true;
    default:
      return false;
  }
}

namespace {

MobilityLabel classify(const AuthorDossier& dossier, const YearCountrySeries& series, Country focal,
                       const std::vector<MigrationEvent>& events, const CareerAnchor& origin,
                       const CareerAnchor& destination) {
  const auto years = series.years();
  const bool focal_ever_mode =
      std::any_of(years.begin(), years.end(), [&](const YearModes& ym) { return ym.has_mode(focal); });
  if (!focal_ever_mode) return MobilityLabel::kNonFocal;
  if (dossier.publication_count() == 1) return MobilityLabel::kSinglePaper;
  if (events.empty()) return MobilityLabel::kNonMover;
  if (!origin.determined() || !destination.determined()) {
    spdlog::debug("author {}: undetermined origin or destination", dossier.author_id);
  }
  const bool from_focal = origin.country == focal;
  const bool to_focal = destination.country == focal;
  if (!from_focal && to_focal) return MobilityLabel::kImmigrant;
  if (from_focal && !to_focal) return MobilityLabel::kEmigrant;
  if (from_focal && to_focal) return MobilityLabel::kReturnMigrant;
  return MobilityLabel::kTransient;
}

}  // namespace

MobilityLabel classify_mobility(const AuthorDossier& dossier, const YearCountrySeries& series, Country focal) {
  return classify(dossier, series, focal, detect_events(series), academic_origin(series),
                  academic_destination(series));
}

AuthorMobility analyze_mobility(const AuthorDossier& dossier, Country focal) {
  AuthorMobility out;
  out.series = YearCountrySeries::from_dossier(dossier);
  auto& p = out.profile;
  p.author_id = dossier.author_id;
  p.first_year = dossier.first_year;
  p.last_year = dossier.last_year;
  p.events = detect_events(out.series);
  p.origin = academic_origin(out.series);
  p.destination = academic_destination(out.series);
  p.label = classify(dossier, out.series, focal, p.events, p.origin, p.destination);
  return out;
}

std::map<Country, double> intermediate_countries(const MobilityProfile& profile, const YearCountrySeries& series,
                                                 Country focal) {
  if (profile.label != MobilityLabel::kReturnMigrant) {
    throw std::invalid_argument("intermediate_countries applies to return migrants only");
  }
  auto collect = [&](bool strictly_between) {
    std::set<Country> away;
    for (const auto& ym : series.years()) {
      if (strictly_between && (ym.year <= profile.origin.year || ym.year >= profile.destination.year)) continue;
      for (Country c : ym.modes) {
        if (c != focal) away.insert(c);
      }
    }
    return away;
  };
  auto away = collect(true);
  if (away.empty()) away = collect(false);
  std::map<Country, double> weights;
  for (Country c : away) weights[c] = 1.0 / static_cast<double>(away.size());
  return weights;
}

namespace {

using EdgeKey = std::tuple<std::optional<taxonomy::FieldClass>, Country, Country>;

bool counts_as_mover(MobilityLabel label, const FlowOptions& options) {
  switch (label) {
    case MobilityLabel::kImmigrant:
    case MobilityLabel::kEmigrant:
    case MobilityLabel::kReturnMigrant:
      return true;
    case MobilityLabel::kTransient:
      return options.include_transients;
    default:
      return false;
  }
}

std::optional<taxonomy::FieldClass> field_for(std::size_t i, const FlowOptions& options,
                                              std::span<const std::optional<taxonomy::FieldClass>> fields,
                                              std::size_t n) {
  if (!options.group_by_field) return std::nullopt;
  if (fields.size() != n) throw std::invalid_argument("grouping flows by field needs one field per profile");
  return fields[i];
}

std::vector<FlowEdge> to_edges(const std::map<EdgeKey, double>& weights) {
  std::vector<FlowEdge> edges;
  edges.reserve(weights.size());
  for (const auto& [key, w] : weights) {
    edges.push_back({std::get<1>(key), std::get<2>(key), std::get<0>(key), w});
  }
  return edges;
}

}  // namespace

std::vector<FlowEdge> build_flow_network(std::span<const MobilityProfile> profiles, Country focal,
                                         const FlowOptions& options,
                                         std::span<const std::optional<taxonomy::FieldClass>> fields) {
  std::map<EdgeKey, double> weights;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    if (!counts_as_mover(p.label, options)) continue;
    const auto field = field_for(i, options, fields, profiles.size());
    if (p.label == MobilityLabel::kTransient) {
      weights[{field, p.origin.country, focal}] += 0.5;
      weights[{field, focal, p.destination.country}] += 0.5;
    } else {
      weights[{field, p.origin.country, p.destination.country}] += 1.0;
    }
  }
  return to_edges(weights);
}

std::vector<FlowEdge> build_move_network(std::span<const MobilityProfile> profiles, Country focal,
                                         const FlowOptions& options,
                                         std::span<const std::optional<taxonomy::FieldClass>> fields) {
  (void)focal;
  std::map<EdgeKey, double> weights;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    if (!counts_as_mover(p.label, options)) continue;
    const auto field = field_for(i, options, fields, profiles.size());
    for (const auto& e : p.events) {
      std::vector<Country> arrived;
      std::set_difference(e.to_modes.begin(), e.to_modes.end(), e.from_modes.begin(), e.from_modes.end(),
                          std::back_inserter(arrived));
      if (arrived.empty()) arrived = e.to_modes;
      for (Country c : arrived) weights[{field, e.vanished, c}] += 1.0 / static_cast<double>(arrived.size());
    }
  }
  return to_edges(weights);
}

void write_flows_csv(std::span<const FlowEdge> edges, std::ostream& out) {
  CsvWriter w(out);
  w.row("origin", "destination", "major_field", "weight");
  for (const auto& e : edges) {
    w.row(e.origin.known() ? e.origin.str() : std::string("UNDETERMINED"),
          e.destination.known() ? e.destination.str() : std::string("UNDETERMINED"),
          e.field ? taxonomy::to_string(*e.field) : std::string_view(), format_number(e.weight));
  }
}

namespace {

std::string anchor_text(const CareerAnchor& a) {
  return a.determined() ? a.country.str() : std::string("UNDETERMINED");
}

}  // namespace

void write_profiles_csv(std::span<const MobilityProfile> profiles, std::ostream& out) {
  CsvWriter w(out);
  w.row("author_id", "label", "origin", "destination", "n_events", "first_year", "last_year");
  for (const auto& p : profiles) {
    w.row(p.author_id, to_string(p.label), anchor_text(p.origin), anchor_text(p.destination),
          std::to_string(p.events.size()), std::to_string(p.first_year), std::to_string(p.last_year));
  }
}

std::vector<ProfileRow> read_profiles_csv(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> f;
  const std::vector<std::string> header{"author_id", "label", "origin", "destination",
                                        "n_events", "first_year", "last_year"};
  if (!reader.next(f) || f != header) throw SchemaMismatch("profiles.csv header mismatch");
  std::vector<ProfileRow> rows;
  auto to_int = [&](const std::string& s) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw DataError("profiles.csv line " + std::to_string(reader.line()) + ": bad integer '" + s + "'");
    }
    return v;
  };
  auto to_country = [&](const std::string& s) {
    if (s == "UNDETERMINED") return kUnknownCountry;
    auto c = Country::parse(s);
    if (!c) throw DataError("profiles.csv line " + std::to_string(reader.line()) + ": bad country '" + s + "'");
    return *c;
  };
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != header.size()) throw DataError("profiles.csv line " + std::to_string(reader.line()) + ": bad row");
    auto label = label_from_string(f[1]);
    if (!label) throw DataError("profiles.csv line " + std::to_string(reader.line()) + ": bad label '" + f[1] + "'");
    rows.push_back({f[0], *label, to_country(f[2]), to_country(f[3]), static_cast<std::size_t>(to_int(f[4])),
                    static_cast<int>(to_int(f[5])), static_cast<int>(to_int(f[6]))});
  }
  return rows;
}

}  // namespace scholmig::mobility

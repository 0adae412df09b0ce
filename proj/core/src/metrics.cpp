#include "scholmig/metrics.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <tuple>

#include "scholmig/csv.hpp"

namespace scholmig::metrics {

using mobility::MobilityLabel;

int academic_age(const AuthorDossier& dossier, int snapshot_year) {
  if (dossier.records.empty()) throw std::invalid_argument("academic_age of an empty dossier");
  if (snapshot_year < dossier.first_year) {
    throw std::invalid_argument(fmt::format("snapshot year {} precedes first publication {} of {}", snapshot_year,
                                            dossier.first_year, dossier.author_id));
  }
  return std::max(1, snapshot_year - dossier.first_year);
}

CitationSummary annual_citation_rate(const AuthorDossier& dossier, int snapshot_year) {
  CitationSummary s;
  std::set<std::string_view> seen;
  for (const auto& r : dossier.records) {
    if (seen.insert(r.pub_id).second) s.total_citations += r.citation_count;
  }
  s.academic_age = academic_age(dossier, snapshot_year);
  s.annual_rate = static_cast<double>(s.total_citations) / s.academic_age;
  return s;
}

FieldMeans field_mean_rates(std::span<const RatedResearcher> researchers, RateScope scope) {
  std::map<taxonomy::FieldClass, std::pair<double, std::int64_t>> sums;
  for (const auto& r : researchers) {
    if (!r.field) continue;
    if (scope == RateScope::kMigrants && !mobility::is_migrant(r.label)) continue;
    auto& [sum, n] = sums[*r.field];
    sum += r.rate;
    ++n;
  }
  FieldMeans means;
  for (auto f : taxonomy::kFieldClasses) {
    auto it = sums.find(f);
    if (it == sums.end()) {
      spdlog::warn("no researchers in field {}; mean rate omitted", taxonomy::to_string(f));
      continue;
    }
    means[f] = it->second.first / static_cast<double>(it->second.second);
  }
  return means;
}

double field_normalized_rate(double rate, taxonomy::FieldClass field, const FieldMeans& means) {
  auto it = means.find(field);
  if (it == means.end() || it->second == 0.0) return 0.0;
  return rate / it->second;
}

std::string_view to_string(CitationClass c) {
  switch (c) {
    case CitationClass::kLow:
      return "low";
    case CitationClass::kModerate:
      return "moderate";
    case CitationClass::kHigh:
      return "high";
  }
  return "?";
}

CitationClassBoundaries::CitationClassBoundaries(double t1, double t2) : t1_(t1), t2_(t2) {
  if (!(t1 <= t2)) throw std::invalid_argument(fmt::format("citation class boundaries out of order: {} > {}", t1, t2));
}

CitationClassBoundaries CitationClassBoundaries::fit(std::span<const double> rates) {
  if (rates.empty()) throw std::invalid_argument("cannot fit citation classes on an empty sample");
  std::vector<double> v(rates.begin(), rates.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  // Low and high classes each take round(n / 3) members.
  const std::size_t third = (n + 1) / 3;
  const std::size_t upper = n - third - 1;
  return {v[third], v[std::max(third, upper)]};
}

CitationClass citation_class(double rate, const CitationClassBoundaries& b) {
  if (rate < b.t1()) return CitationClass::kLow;
  if (rate <= b.t2()) return CitationClass::kModerate;
  return CitationClass::kHigh;
}

bool present_in_year(const mobility::YearCountrySeries& series, Country focal, int year, int padding) {
  if (padding < 0) throw std::invalid_argument("padding must be non-negative");
  std::optional<int> nearest_focal;
  std::optional<int> nearest_other;
  for (const auto& ym : series.years()) {
    const int d = std::abs(ym.year - year);
    auto& slot = ym.has_mode(focal) ? nearest_focal : nearest_other;
    if (!slot || d < *slot) slot = d;
  }
  if (!nearest_focal || *nearest_focal > padding) return false;
  return !nearest_other || *nearest_other > *nearest_focal;
}

double estimate_population(std::span<const mobility::YearCountrySeries> series, Country focal, int year,
                           int padding) {
  double m = 0.0;
  for (const auto& s : series) {
    if (present_in_year(s, focal, year, padding)) m += 1.0;
  }
  return m;
}

PopulationSeries estimate_population_series(std::span<const mobility::YearCountrySeries> series, Country focal,
                                            int first_year, int last_year, int padding) {
  PopulationSeries out;
  out.padding = padding;
  for (int y = first_year; y <= last_year; ++y) out.by_year[y] = 0.0;
  for (const auto& s : series) {
    for (int y = first_year; y <= last_year; ++y) {
      if (present_in_year(s, focal, y, padding)) out.by_year[y] += 1.0;
    }
  }
  return out;
}

bool is_immigration(const mobility::MigrationEvent& e, Country focal) {
  return e.vanished != focal && std::binary_search(e.to_modes.begin(), e.to_modes.end(), focal);
}

bool is_emigration(const mobility::MigrationEvent& e, Country focal) { return e.vanished == focal; }

MigrationCounts count_migrations(std::span<const mobility::MobilityProfile> profiles, Country focal) {
  MigrationCounts counts;
  for (const auto& p : profiles) {
    if (!mobility::is_migrant(p.label)) continue;
    std::set<int> in_years;
    std::set<int> out_years;
    for (const auto& e : p.events) {
      if (is_immigration(e, focal)) in_years.insert(e.to_year);
      if (is_emigration(e, focal)) out_years.insert(e.to_year);
    }
    for (int y : in_years) ++counts.immigrants[y];
    for (int y : out_years) ++counts.emigrants[y];
  }
  return counts;
}

std::optional<NmrPoint> net_migration_rate(int year, std::int64_t immigrants, std::int64_t emigrants,
                                           double population) {
  if (!(population > 0.0)) {
    spdlog::warn("year {}: zero population, net migration rate undefined", year);
    return std::nullopt;
  }
  NmrPoint p{year, immigrants, emigrants, population};
  p.in_rate = 1000.0 * static_cast<double>(immigrants) / population;
  p.out_rate = 1000.0 * static_cast<double>(emigrants) / population;
  p.nmr = p.in_rate - p.out_rate;
  return p;
}

std::vector<NmrPoint> nmr_series(std::span<const mobility::MobilityProfile> profiles,
                                 std::span<const mobility::YearCountrySeries> series, Country focal, int first_year,
                                 int last_year, int padding) {
  const auto population = estimate_population_series(series, focal, first_year, last_year, padding);
  const auto counts = count_migrations(profiles, focal);
  auto lookup = [](const std::map<int, std::int64_t>& m, int y) {
    auto it = m.find(y);
    return it == m.end() ? std::int64_t{0} : it->second;
  };
  std::vector<NmrPoint> points;
  for (const auto& [year, m] : population.by_year) {
    if (auto p = net_migration_rate(year, lookup(counts.immigrants, year), lookup(counts.emigrants, year), m)) {
      points.push_back(*p);
    }
  }
  return points;
}

FnbdResult fnbd(std::string discipline, const FnbdTerms& t, double min_support) {
  FnbdResult r;
  r.discipline = std::move(discipline);
  r.p_emi = t.emigrants;
  r.p_tra = t.transients;
  r.p_imm = t.immigrants;
  r.p_ret = t.returners;
  r.p_d = t.total();
  if (r.p_d > 0.0) {
    r.fnbd = std::clamp((r.p_emi + r.p_tra - r.p_imm - r.p_ret) / r.p_d, -1.0, 1.0);
  }
  r.reliable = r.fnbd.has_value() && r.p_d >= min_support;
  return r;
}

std::vector<FnbdResult> fnbd_by_discipline(std::span<const MobilityLabel> labels,
                                           std::span<const std::optional<taxonomy::DisciplineVector>> vectors,
                                           double min_support) {
  if (labels.size() != vectors.size()) throw std::invalid_argument("labels and vectors must align");
  std::array<FnbdTerms, taxonomy::kSubfieldCount> terms{};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!vectors[i]) continue;
    for (std::size_t d = 0; d < taxonomy::kSubfieldCount; ++d) {
      const double nc = vectors[i]->nc[d];
      switch (labels[i]) {
        case MobilityLabel::kEmigrant:
          terms[d].emigrants += nc;
          break;
        case MobilityLabel::kTransient:
          terms[d].transients += nc;
          break;
        case MobilityLabel::kImmigrant:
          terms[d].immigrants += nc;
          break;
        case MobilityLabel::kReturnMigrant:
          terms[d].returners += nc;
          break;
        default:
          break;
      }
    }
  }
  std::vector<FnbdResult> out;
  out.reserve(taxonomy::kSubfieldCount);
  for (std::size_t d = 0; d < taxonomy::kSubfieldCount; ++d) {
    out.push_back(fnbd(std::string(taxonomy::to_string(taxonomy::subfield_at(d))), terms[d], min_support));
  }
  return out;
}

std::string describe_fnbd(const FnbdResult& r) {
  std::string text;
  if (!r.fnbd) {
    text = r.discipline + ": undefined";
  } else if (*r.fnbd > 0.0) {
    text = fmt::format("{}: {:.1f}% net drain", r.discipline, *r.fnbd * 100.0);
  } else if (*r.fnbd < 0.0) {
    text = fmt::format("{}: {:.1f}% net gain", r.discipline, -*r.fnbd * 100.0);
  } else {
    text = r.discipline + ": balanced";
  }
  if (!r.reliable) text += " (low support)";
  return text;
}

std::vector<ClassComposition> citation_class_composition(std::span<const ClassifiedMigrant> migrants) {
  std::map<std::pair<std::string, Country>, std::array<std::int64_t, 3>> table;
  for (const auto& m : migrants) {
    const auto slot = static_cast<std::size_t>(m.citation_class);
    if (m.label == MobilityLabel::kImmigrant && m.origin.known()) ++table[{"immigrant", m.origin}][slot];
    if (m.label == MobilityLabel::kEmigrant && m.destination.known()) ++table[{"emigrant", m.destination}][slot];
  }
  std::vector<ClassComposition> rows;
  for (const auto& [key, counts] : table) rows.push_back({key.second, key.first, counts});
  std::sort(rows.begin(), rows.end(), [](const ClassComposition& a, const ClassComposition& b) {
    return std::tie(a.country, a.direction) < std::tie(b.country, b.direction);
  });
  return rows;
}

void write_nmr_csv(std::span<const NmrPoint> points, std::ostream& out) {
  CsvWriter w(out);
  w.row("year", "I", "E", "M", "in_rate", "out_rate", "nmr");
  for (const auto& p : points) {
    w.row(std::to_string(p.year), std::to_string(p.immigrants), std::to_string(p.emigrants),
          format_number(p.population), format_number(p.in_rate), format_number(p.out_rate), format_number(p.nmr));
  }
}

void write_fnbd_csv(std::span<const FnbdResult> results, std::ostream& out) {
  CsvWriter w(out);
  w.row("discipline", "P_d", "P_emi", "P_tra", "P_imm", "P_ret", "fnbd", "reliable");
  for (const auto& r : results) {
    w.row(r.discipline, format_number(r.p_d), format_number(r.p_emi), format_number(r.p_tra), format_number(r.p_imm),
          format_number(r.p_ret), r.fnbd ? format_number(*r.fnbd) : std::string(),
          r.reliable ? "true" : "false");
  }
}

void write_citation_classes_csv(std::span<const ClassComposition> rows, std::ostream& out) {
  CsvWriter w(out);
  w.row("country", "direction", "low", "moderate", "high");
  for (const auto& r : rows) {
    w.row(r.country.str(), r.direction, std::to_string(r.counts[0]), std::to_string(r.counts[1]),
          std::to_string(r.counts[2]));
  }
}

}  // namespace scholmig::metrics

#include "scholmig/synth.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "scholmig/error.hpp"
#include "scholmig/random.hpp"
#include "scholmig/text.hpp"

namespace scholmig::synth {

using taxonomy::Subfield;

int LabelCounts::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

std::vector<PartnerCountry> default_partners() {
  const std::pair<const char*, double> table[] = {
      {"US", 0.30}, {"DE", 0.14}, {"FR", 0.08}, {"GB", 0.08}, {"UA", 0.06}, {"KZ", 0.04}, {"BY", 0.04},
      {"CN", 0.04}, {"JP", 0.03}, {"IT", 0.03}, {"NL", 0.03}, {"CH", 0.03}, {"CA", 0.03}, {"IL", 0.03},
      {"ES", 0.02}, {"SE", 0.02}, {"FI", 0.02}, {"PL", 0.02}, {"KR", 0.02}, {"AU", 0.02},
  };
  std::vector<PartnerCountry> out;
  for (const auto& [code, p] : table) out.push_back({Country::from_code(code), p});
  return out;
}

std::array<double, taxonomy::kSubfieldCount> default_subfield_weights() {
  return {0.05, 0.02, 0.08,  0.02, 0.02, 0.07, 0.04,  0.008, 0.04, 0.02,  0.02,  0.06,  0.02,
          0.03, 0.04, 0.05,  0.12, 0.03, 0.006, 0.02, 0.09, 0.005, 0.05, 0.005, 0.002, 0.005};
}

void GeneratorConfig::validate() const {
  for (int c : labels.counts) {
    if (c < 0) throw std::invalid_argument("label counts must be non-negative");
  }
  for (double f : {merged_id_fraction, missing_country_fraction, tie_year_fraction, secondary_subject_prob,
                   cross_field_subject_prob, subject_retention}) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("generator fractions must lie in [0, 1]");
  }
  if (first_year < 1900 || last_year < first_year) throw std::invalid_argument("invalid generator year range");
  if (last_year - first_year + 1 < 19) throw std::invalid_argument("generator needs a range of at least 19 years");
  if (snapshot_year < last_year) throw std::invalid_argument("snapshot year precedes the generated years");
  if (!focal.known()) throw std::invalid_argument("generator focal country is unknown");
  if (!(citation_sigma >= 0.0)) throw std::invalid_argument("citation sigma must be non-negative");
  for (double m : citation_means) {
    if (!(m > 0.0)) throw std::invalid_argument("citation means must be positive");
  }
  std::set<Country> pool;
  for (const auto& p : partners) {
    if (!p.country.known() || p.country == focal) {
      throw std::invalid_argument("partner countries must be known and differ from the focal country");
    }
    if (!(p.propensity > 0.0)) throw std::invalid_argument("partner propensities must be positive");
    pool.insert(p.country);
  }
  const bool needs_partner = labels[MobilityLabel::kImmigrant] + labels[MobilityLabel::kEmigrant] +
                                 labels[MobilityLabel::kReturnMigrant] + labels[MobilityLabel::kTransient] +
                                 labels[MobilityLabel::kNonFocal] >
                             0;
  if (needs_partner && pool.empty()) throw std::invalid_argument("migrant labels need at least one partner country");
  const long merged = std::lround(merged_id_fraction * labels.total());
  if (merged > 0) {
    if (pool.size() < 7) throw std::invalid_argument("merged IDs need at least seven partner countries");
    if (last_year - first_year + 1 < 24) throw std::invalid_argument("merged IDs need a 24-year range");
  }
  if (emigrant_departure_year &&
      (*emigrant_departure_year - 2 < first_year || *emigrant_departure_year > last_year)) {
    throw std::invalid_argument("emigrant departure year must leave two earlier years in range");
  }
  double total = 0.0;
  for (double w : subfield_weights) {
    if (w < 0.0) throw std::invalid_argument("subfield weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("subfield weights are all zero");
}

GeneratorConfig GeneratorConfig::with_population(int n, std::uint64_t seed) {
  constexpr std::array<double, mobility::kLabelCount> shares{0.22, 0.56, 0.05, 0.08, 0.04, 0.02, 0.03};
  GeneratorConfig cfg;
  cfg.seed = seed;
  int assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    cfg.labels.counts[i] = static_cast<int>(std::floor(shares[i] * n));
    assigned += cfg.labels.counts[i];
  }
  cfg.labels[MobilityLabel::kNonMover] += n - assigned;
  return cfg;
}

const AuthorTruth* GroundTruth::find(std::string_view author_id) const {
  auto it = std::lower_bound(authors.begin(), authors.end(), author_id,
                             [](const AuthorTruth& a, std::string_view id) { return a.author_id < id; });
  return it != authors.end() && it->author_id == author_id ? &*it : nullptr;
}

std::size_t GroundTruth::person_count() const {
  std::size_t n = 0;
  for (const auto& a : authors) n += a.persons.size();
  return n;
}

namespace {

struct Place {
  std::string city;
  std::string institution;
};

std::string title_case(std::string_view token) {
  std::string out(token);
  bool start = true;
  for (char& c : out) {
    if (start && std::isalpha(static_cast<unsigned char>(c))) c = static_cast<char>(std::toupper(c));
    start = c == ' ';
  }
  return out;
}

std::string join_affiliation(const std::string& lab, const Place& place) {
  return lab + ", " + place.institution + ", " + place.city;
}

/// City and institution names per country whose text resolves to that
/// country on its own.
class PlaceBook {
 public:
  explicit PlaceBook(const geoinfer::Gazetteer& gazetteer) : gazetteer_(gazetteer) {
    std::map<Country, std::vector<std::string>> cities;
    std::map<Country, std::vector<std::string>> institutions;
    for (const auto& e : gazetteer.entries()) {
      if (e.priority == static_cast<int>(geoinfer::EntryClass::kCity)) cities[e.country].push_back(e.token);
      if (e.priority == static_cast<int>(geoinfer::EntryClass::kInstitution)) {
        institutions[e.country].push_back(e.token);
      }
    }
    for (const auto& [country, names] : cities) {
      auto& places = places_[country];
      const auto& insts = institutions[country];
      for (std::size_t i = 0; i < names.size(); ++i) {
        Place p{title_case(names[i]), {}};
        p.institution = insts.empty() ? "University of " + p.city : title_case(insts[i % insts.size()]) + " Institute";
        if (geoinfer::infer_country(p.institution + ", " + p.city, gazetteer).country == country) {
          places.push_back(std::move(p));
        }
      }
      if (places.empty()) places_.erase(country);
    }
  }

  bool covers(Country c) const { return places_.count(c) > 0; }

  const Place& pick(Country c, Rng& rng) const {
    const auto& v = places_.at(c);
    return v[rng.index(v.size())];
  }

  std::vector<Country> countries() const {
    std::vector<Country> out;
    for (const auto& [c, v] : places_) out.push_back(c);
    return out;
  }

  /// Lab name built from invented words that match no gazetteer token.
  std::string lab_name(Rng& rng) const {
    auto word = [&] {
      static constexpr std::string_view kOnsets = "bdgklmnprstvz";
      static constexpr std::string_view kVowels = "aeiou";
      for (;;) {
        std::string w;
        const int syllables = 2 + static_cast<int>(rng.index(2));
        for (int s = 0; s < syllables; ++s) {
          w += kOnsets[rng.index(kOnsets.size())];
          w += kVowels[rng.index(kVowels.size())];
        }
        if (rng.bernoulli(0.5)) w += "nrl"[rng.index(3)];
        if (gazetteer_.lookup(w).empty()) {
          w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
          return w;
        }
      }
    };
    for (;;) {
      std::array<std::string, 5> w;
      for (auto& x : w) x = word();
      std::string lab = fmt::format("{} {} Research Group, Laboratory of {} {} {}", w[0], w[1], w[2], w[3], w[4]);
      if (!geoinfer::infer_country(lab, gazetteer_).matched_token) return lab;
    }
  }

 private:
  const geoinfer::Gazetteer& gazetteer_;
  std::map<Country, std::vector<Place>> places_;
};

struct Stay {
  Country country;
  int years = 1;
};

struct Person {
  std::string key;
  std::string author_id;
  MobilityLabel label = MobilityLabel::kNonMover;
  std::vector<std::vector<Country>> year_pubs;  ///< one country per publication
  std::vector<int> years;
  MajorField field = MajorField::kPhysical;
  std::vector<int> codes;  ///< codes[0] is carried by every publication
  double rate = 0.0;
  std::string lab;
  Country origin;
  Country destination;
};

class Generator {
 public:
  Generator(const GeneratorConfig& cfg, const geoinfer::Gazetteer& gazetteer) : cfg_(cfg), places_(gazetteer) {
    const auto table = taxonomy::AsjcTable::standard();
    for (int code = 1000; code < 4000; ++code) {
      if (auto s = table.lookup(code)) codes_[taxonomy::index(*s)].push_back(code);
    }
    if (!places_.covers(cfg.focal)) {
      throw std::invalid_argument(fmt::format("gazetteer has no city for focal country {}", cfg.focal.str()));
    }
    for (const auto& p : cfg.partners) {
      if (!places_.covers(p.country)) {
        throw std::invalid_argument(fmt::format("gazetteer has no city for partner {}", p.country.str()));
      }
    }
  }

  SyntheticCorpus run() {
    std::vector<Person> persons;
    std::size_t serial = 0;
    auto next_id = [&] { return fmt::format("{}{:06d}", cfg_.id_prefix, serial++); };
    for (std::size_t l = 0; l < mobility::kLabelCount; ++l) {
      for (int i = 0; i < cfg_.labels.counts[l]; ++i) {
        Person p;
        p.author_id = next_id();
        p.key = p.author_id;
        p.label = static_cast<MobilityLabel>(l);
        build_single(p, persons.size());
        persons.push_back(std::move(p));
      }
    }
    const long merged = std::lround(cfg_.merged_id_fraction * cfg_.labels.total());
    for (long m = 0; m < merged; ++m) {
      const auto id = next_id();
      auto [a, b] = build_merged(id, persons.size());
      persons.push_back(std::move(a));
      persons.push_back(std::move(b));
    }
    rescale_rates(persons);
    return emit(persons);
  }

 private:
  Rng person_rng(std::size_t index, std::uint64_t stream) const {
    return Rng(mix_seed(mix_seed(cfg_.seed, stream), index));
  }

  Country pick_partner(Rng& rng, const std::set<Country>& exclude) const {
    std::vector<double> w;
    w.reserve(cfg_.partners.size());
    for (const auto& p : cfg_.partners) w.push_back(exclude.count(p.country) ? 0.0 : p.propensity);
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
      return cfg_.partners[rng.index(cfg_.partners.size())].country;
    }
    return cfg_.partners[rng.weighted(w)].country;
  }

  std::vector<Stay> plan_stays(MobilityLabel label, Rng& rng) const {
    const Country f = cfg_.focal;
    auto len = [&] { return rng.uniform_int(1, 4); };
    const bool chain = cfg_.partners.size() >= 2 && rng.bernoulli(0.2);
    switch (label) {
      case MobilityLabel::kSinglePaper:
        return {{f, 1}};
      case MobilityLabel::kNonMover:
        return {{f, rng.uniform_int(1, 10)}};
      case MobilityLabel::kImmigrant: {
        const Country x = pick_partner(rng, {});
        if (chain) return {{x, len()}, {pick_partner(rng, {x}), len()}, {f, len()}};
        return {{x, len()}, {f, len()}};
      }
      case MobilityLabel::kEmigrant: {
        const Country x = pick_partner(rng, {});
        if (chain) return {{f, len()}, {x, len()}, {pick_partner(rng, {x}), len()}};
        return {{f, len()}, {x, len()}};
      }
      case MobilityLabel::kReturnMigrant: {
        const Country x = pick_partner(rng, {});
        if (chain) return {{f, len()}, {x, len()}, {pick_partner(rng, {x}), len()}, {f, len()}};
        return {{f, len()}, {x, len()}, {f, len()}};
      }
      case MobilityLabel::kTransient: {
        const Country x = pick_partner(rng, {});
        const Country y = rng.bernoulli(0.3) ? x : pick_partner(rng, {x});
        return {{x, len()}, {f, len()}, {y, len()}};
      }
      case MobilityLabel::kNonFocal: {
        const Country x = pick_partner(rng, {});
        if (chain) return {{x, len()}, {pick_partner(rng, {x}), len()}};
        return {{x, rng.uniform_int(2, 6)}};
      }
    }
    return {};
  }

  /// Expands stays into per-year publication countries. Returns the index of
  /// the first year of the second stay (or 0).
  std::size_t expand(Person& p, const std::vector<Stay>& stays, Rng& rng, Rng& tie_rng) const {
    std::size_t second_stay = 0;
    for (std::size_t s = 0; s < stays.size(); ++s) {
      if (s > 0 && tie_rng.bernoulli(cfg_.tie_year_fraction)) {
        p.year_pubs.push_back({stays[s - 1].country, stays[s].country});
      }
      if (s == 1) second_stay = p.year_pubs.size();
      for (int y = 0; y < stays[s].years; ++y) {
        int pubs = 1;
        if (p.label != MobilityLabel::kSinglePaper) {
          pubs += rng.bernoulli(0.6);
          pubs += rng.bernoulli(0.4);
        }
        p.year_pubs.emplace_back(static_cast<std::size_t>(pubs), stays[s].country);
      }
    }
    return second_stay;
  }

  void assign_years(Person& p, Rng& rng, int lo, int hi, std::optional<std::pair<std::size_t, int>> anchor) const {
    const auto k = static_cast<int>(p.year_pubs.size());
    p.years.assign(p.year_pubs.size(), 0);
    if (anchor) {
      const auto [index, year] = *anchor;
      for (int i = 0; i < k; ++i) p.years[i] = year + (i - static_cast<int>(index));
      std::size_t front = 0;
      while (front < p.years.size() && p.years[front] < lo) ++front;
      std::size_t back = p.years.size();
      while (back > front && p.years[back - 1] > hi) --back;
      p.years = {p.years.begin() + static_cast<long>(front), p.years.begin() + static_cast<long>(back)};
      p.year_pubs = {p.year_pubs.begin() + static_cast<long>(front), p.year_pubs.begin() + static_cast<long>(back)};
      return;
    }
    int budget = (hi - lo + 1) - k;
    if (budget < 0) throw std::logic_error("career longer than its era");
    std::vector<int> gaps(p.year_pubs.size(), 0);
    for (int i = 1; i < k && budget > 0; ++i) {
      if (rng.bernoulli(0.15)) {
        gaps[i] = 1;
        --budget;
      }
    }
    int year = lo + rng.uniform_int(0, budget);
    for (int i = 0; i < k; ++i) {
      year += gaps[i];
      p.years[i] = year++;
    }
  }

  MajorField draw_field(Rng& rng, std::optional<MajorField> exclude) const {
    std::array<double, taxonomy::kMajorFieldCount> w{};
    for (std::size_t s = 0; s < taxonomy::kSubfieldCount; ++s) {
      w[taxonomy::index(taxonomy::major_field_of(taxonomy::subfield_at(s)))] += cfg_.subfield_weights[s];
    }
    if (exclude) w[taxonomy::index(*exclude)] = 0.0;
    return taxonomy::major_field_at(rng.weighted(w));
  }

  std::optional<Subfield> draw_subfield(Rng& rng, MajorField field, bool inside, std::set<Subfield> exclude) const {
    std::array<double, taxonomy::kSubfieldCount> w{};
    bool any = false;
    for (std::size_t s = 0; s < taxonomy::kSubfieldCount; ++s) {
      const auto sub = taxonomy::subfield_at(s);
      if ((taxonomy::major_field_of(sub) == field) != inside || exclude.count(sub)) continue;
      w[s] = cfg_.subfield_weights[s];
      any = any || w[s] > 0.0;
    }
    if (!any) return std::nullopt;
    return taxonomy::subfield_at(rng.weighted(w));
  }

  int draw_code(Rng& rng, Subfield s) const {
    const auto& v = codes_[taxonomy::index(s)];
    return v[rng.index(v.size())];
  }

  void draw_subjects(Person& p, Rng& rng, std::optional<MajorField> exclude_field, bool allow_cross) const {
    p.field = draw_field(rng, exclude_field);
    const auto primary = draw_subfield(rng, p.field, true, {});
    p.codes = {draw_code(rng, *primary)};
    if (rng.bernoulli(cfg_.secondary_subject_prob)) {
      if (auto s = draw_subfield(rng, p.field, true, {*primary})) p.codes.push_back(draw_code(rng, *s));
    }
    if (allow_cross && rng.bernoulli(cfg_.cross_field_subject_prob)) {
      if (auto s = draw_subfield(rng, p.field, false, {})) p.codes.push_back(draw_code(rng, *s));
    }
  }

  void finish_person(Person& p, Rng& rng) const {
    p.rate = cfg_.citation_sigma > 0.0
                 ? rng.lognormal_with_mean(cfg_.citation_means[taxonomy::index(p.field)], cfg_.citation_sigma)
                 : cfg_.citation_means[taxonomy::index(p.field)];
    p.lab = places_.lab_name(rng);
    auto single_mode = [](const std::vector<Country>& pubs) -> std::optional<Country> {
      std::map<Country, int> counts;
      for (Country c : pubs) ++counts[c];
      int best = 0;
      for (const auto& [c, n] : counts) best = std::max(best, n);
      std::optional<Country> mode;
      for (const auto& [c, n] : counts) {
        if (n != best) continue;
        if (mode) return std::nullopt;
        mode = c;
      }
      return mode;
    };
    for (const auto& pubs : p.year_pubs) {
      if (auto m = single_mode(pubs)) {
        p.origin = *m;
        break;
      }
    }
    for (auto it = p.year_pubs.rbegin(); it != p.year_pubs.rend(); ++it) {
      if (auto m = single_mode(*it)) {
        p.destination = *m;
        break;
      }
    }
  }

  void build_single(Person& p, std::size_t index) const {
    Rng rng = person_rng(index, 0);
    Rng tie_rng = person_rng(index, 1);
    const auto stays = plan_stays(p.label, rng);
    const auto second = expand(p, stays, rng, tie_rng);
    if (p.label == MobilityLabel::kNonFocal && rng.bernoulli(0.5)) {
      // A minority focal affiliation that never reaches the mode.
      auto& pubs = p.year_pubs[rng.index(p.year_pubs.size())];
      if (std::all_of(pubs.begin(), pubs.end(), [&](Country c) { return c == pubs.front(); })) {
        const Country x = pubs.front();
        pubs = {x, x, cfg_.focal};
      }
    }
    if (p.label == MobilityLabel::kNonMover && p.year_pubs.size() == 1 && p.year_pubs[0].size() < 2) {
      p.year_pubs[0].push_back(p.year_pubs[0].front());
    }
    std::optional<std::pair<std::size_t, int>> anchor;
    if (p.label == MobilityLabel::kEmigrant && cfg_.emigrant_departure_year) {
      anchor = {second, *cfg_.emigrant_departure_year};
    }
    assign_years(p, rng, cfg_.first_year, cfg_.last_year, anchor);
    draw_subjects(p, rng, std::nullopt, true);
    finish_person(p, rng);
  }

  std::pair<Person, Person> build_merged(const std::string& id, std::size_t index) const {
    Rng rng = person_rng(index, 2);
    Rng tie_rng = person_rng(index, 3);
    const int mid = cfg_.first_year + (cfg_.last_year - cfg_.first_year) / 2;
    std::set<Country> used;
    auto fresh = [&] {
      const Country c = pick_partner(rng, used);
      used.insert(c);
      return c;
    };
    Person a;
    a.author_id = id;
    a.key = id + "a";
    a.label = MobilityLabel::kEmigrant;
    const std::vector<Stay> a_stays{{cfg_.focal, 2}, {fresh(), 2}, {fresh(), 2}, {fresh(), 2}};
    expand(a, a_stays, rng, tie_rng);
    assign_years(a, rng, cfg_.first_year, mid - 1, std::nullopt);
    draw_subjects(a, rng, std::nullopt, false);
    finish_person(a, rng);

    Person b;
    b.author_id = id;
    b.key = id + "b";
    b.label = MobilityLabel::kNonFocal;
    const std::vector<Stay> b_stays{{fresh(), 2}, {fresh(), 2}, {fresh(), 2}, {fresh(), 2}};
    expand(b, b_stays, rng, tie_rng);
    assign_years(b, rng, mid + 2, cfg_.last_year, std::nullopt);
    draw_subjects(b, rng, a.field, false);
    finish_person(b, rng);
    return {std::move(a), std::move(b)};
  }

  void rescale_rates(std::vector<Person>& persons) const {
    std::array<double, taxonomy::kMajorFieldCount> sum{};
    std::array<int, taxonomy::kMajorFieldCount> n{};
    for (const auto& p : persons) {
      sum[taxonomy::index(p.field)] += p.rate;
      ++n[taxonomy::index(p.field)];
    }
    for (auto& p : persons) {
      const auto f = taxonomy::index(p.field);
      p.rate *= cfg_.citation_means[f] * n[f] / sum[f];
    }
  }

  SyntheticCorpus emit(const std::vector<Person>& persons) const {
    SyntheticCorpus out;
    out.corpus.snapshot_year = cfg_.snapshot_year;
    std::map<std::string, AuthorTruth> truth;
    for (std::size_t idx = 0; idx < persons.size(); ++idx) {
      const auto& p = persons[idx];
      Rng rng = person_rng(idx, 4);
      Rng mask_rng = person_rng(idx, 5);
      auto& at = truth[p.author_id];
      at.author_id = p.author_id;
      at.merged = at.merged || p.key != p.author_id;
      PersonTruth pt{p.key, p.label, p.origin, p.destination, p.field, p.rate, {}};

      std::map<Country, Place> places;
      std::vector<std::pair<int, Country>> pubs;
      for (std::size_t y = 0; y < p.years.size(); ++y) {
        for (Country c : p.year_pubs[y]) pubs.emplace_back(p.years[y], c);
      }
      const int age = std::max(1, cfg_.snapshot_year - p.years.front());
      const auto total = static_cast<std::int64_t>(std::llround(p.rate * age));
      std::vector<std::int64_t> citations(pubs.size(), 0);
      for (std::int64_t c = 0; c < total; ++c) ++citations[rng.index(pubs.size())];

      for (std::size_t i = 0; i < pubs.size(); ++i) {
        const auto [year, country] = pubs[i];
        auto place = places.find(country);
        if (place == places.end()) place = places.emplace(country, places_.pick(country, rng)).first;
        AuthorshipRecord r;
        r.author_id = p.author_id;
        r.pub_id = fmt::format("{}:{}", p.key, i + 1);
        r.year = year;
        r.affiliation_text = join_affiliation(p.lab, place->second);
        r.country = country;
        r.asjc_codes.push_back(p.codes.front());
        for (std::size_t c = 1; c < p.codes.size(); ++c) {
          if (rng.bernoulli(cfg_.subject_retention)) r.asjc_codes.push_back(p.codes[c]);
        }
        std::sort(r.asjc_codes.begin(), r.asjc_codes.end());
        r.citation_count = citations[i];
        if (mask_rng.bernoulli(cfg_.missing_country_fraction)) {
          at.masked.push_back({r.pub_id, r.country});
          r.country = kUnknownCountry;
        }
        pt.pub_ids.push_back(r.pub_id);
        out.corpus.records.push_back(std::move(r));
      }
      at.persons.push_back(std::move(pt));
    }
    for (auto& [id, at] : truth) out.truth.authors.push_back(std::move(at));
    return out;
  }

  const GeneratorConfig& cfg_;
  PlaceBook places_;
  std::array<std::vector<int>, taxonomy::kSubfieldCount> codes_;
};

std::string country_text(Country c) { return c.known() ? c.str() : std::string("UNDETERMINED"); }

Country country_from_text(const std::string& s) {
  if (s == "UNDETERMINED") return kUnknownCountry;
  auto c = Country::parse(s);
  if (!c) throw DataError("truth: bad country '" + s + "'");
  return *c;
}

}  // namespace

SyntheticCorpus generate_corpus(const GeneratorConfig& config, const geoinfer::Gazetteer& gazetteer) {
  config.validate();
  return Generator(config, gazetteer).run();
}

void write_truth_jsonl(const GroundTruth& truth, std::ostream& out) {
  for (const auto& a : truth.authors) {
    nlohmann::json j;
    j["author_id"] = a.author_id;
    j["merged"] = a.merged;
    j["persons"] = nlohmann::json::array();
    for (const auto& p : a.persons) {
      j["persons"].push_back({{"key", p.key},
                              {"label", mobility::to_string(p.label)},
                              {"origin", country_text(p.origin)},
                              {"destination", country_text(p.destination)},
                              {"field", taxonomy::to_string(p.field)},
                              {"citation_rate", p.citation_rate},
                              {"pub_ids", p.pub_ids}});
    }
    j["masked"] = nlohmann::json::array();
    for (const auto& m : a.masked) j["masked"].push_back({{"pub_id", m.pub_id}, {"country", m.country.str()}});
    out << j.dump() << '\n';
  }
}

GroundTruth read_truth_jsonl(std::istream& in) {
  GroundTruth truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      AuthorTruth a;
      a.author_id = j.at("author_id").get<std::string>();
      a.merged = j.at("merged").get<bool>();
      for (const auto& pj : j.at("persons")) {
        PersonTruth p;
        p.key = pj.at("key").get<std::string>();
        const auto label = mobility::label_from_string(pj.at("label").get<std::string>());
        const auto field = taxonomy::major_field_from_string(pj.at("field").get<std::string>());
        if (!label || !field) throw DataError("bad label or field");
        p.label = *label;
        p.field = *field;
        p.origin = country_from_text(pj.at("origin").get<std::string>());
        p.destination = country_from_text(pj.at("destination").get<std::string>());
        p.citation_rate = pj.at("citation_rate").get<double>();
        p.pub_ids = pj.at("pub_ids").get<std::vector<std::string>>();
        a.persons.push_back(std::move(p));
      }
      for (const auto& mj : j.at("masked")) {
        a.masked.push_back({mj.at("pub_id").get<std::string>(), country_from_text(mj.at("country").get<std::string>())});
      }
      truth.authors.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("truth line {}: {}", line_no, e.what()));
    } catch (const DataError& e) {
      throw DataError(fmt::format("truth line {}: {}", line_no, e.what()));
    }
  }
  std::sort(truth.authors.begin(), truth.authors.end(),
            [](const AuthorTruth& x, const AuthorTruth& y) { return x.author_id < y.author_id; });
  return truth;
}

std::vector<geoinfer::LabeledAffiliation> labeled_affiliations(const geoinfer::Gazetteer& gazetteer, std::size_t n,
                                                               std::uint64_t seed) {
  const PlaceBook book(gazetteer);
  const auto countries = book.countries();
  if (countries.empty()) throw std::invalid_argument("gazetteer has no usable city entries");
  Rng rng(seed);
  std::vector<geoinfer::LabeledAffiliation> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Country c = countries[rng.index(countries.size())];
    out.push_back({join_affiliation(book.lab_name(rng), book.pick(c, rng)), c});
  }
  return out;
}

nlohmann::json to_json(const ScoreReport& r) {
  return {{"persons", r.persons},
          {"label_accuracy", r.label_accuracy},
          {"origin_accuracy", r.origin_accuracy},
          {"destination_accuracy", r.destination_accuracy},
          {"pair_scope_ids", r.pair_scope_ids},
          {"pair_precision", r.pair_precision},
          {"pair_recall", r.pair_recall},
          {"pair_f1", r.pair_f1},
          {"cross_original_merges", r.cross_original_merges},
          {"masked_rows", r.masked_rows},
          {"fill_accuracy", r.fill_accuracy}};
}

ScoreReport score_against_truth(const Corpus& input, const Corpus& repaired,
                                std::span<const mobility::MobilityProfile> profiles, const GroundTruth& truth) {
  if (input.records.size() != repaired.records.size()) {
    throw DataError(fmt::format("repaired corpus has {} rows, input has {}", repaired.records.size(),
                                input.records.size()));
  }
  std::unordered_map<std::string, std::size_t> row_of_pub;
  row_of_pub.reserve(input.records.size());
  for (std::size_t i = 0; i < input.records.size(); ++i) {
    if (input.records[i].pub_id != repaired.records[i].pub_id) {
      throw DataError(fmt::format("row {} differs between input and repaired corpora", i + 1));
    }
    row_of_pub.emplace(input.records[i].pub_id, i);
  }

  std::vector<const PersonTruth*> person_of_row(input.records.size(), nullptr);
  for (const auto& a : truth.authors) {
    for (const auto& p : a.persons) {
      for (const auto& pub : p.pub_ids) {
        auto it = row_of_pub.find(pub);
        if (it == row_of_pub.end() || input.records[it->second].author_id != a.author_id) {
          throw DataError(fmt::format("truth publication {} is not in the corpus", pub));
        }
        person_of_row[it->second] = &p;
      }
    }
  }
  for (std::size_t i = 0; i < person_of_row.size(); ++i) {
    if (!person_of_row[i]) throw DataError(fmt::format("corpus row {} has no truth entry", i + 1));
  }

  std::unordered_map<std::string, const mobility::MobilityProfile*> profile_of;
  for (const auto& p : profiles) profile_of.emplace(p.author_id, &p);
  std::unordered_map<std::string, std::size_t> rows_per_revised;
  std::unordered_map<std::string, std::set<std::string>> originals_per_revised;
  for (std::size_t i = 0; i < repaired.records.size(); ++i) {
    ++rows_per_revised[repaired.records[i].author_id];
    originals_per_revised[repaired.records[i].author_id].insert(input.records[i].author_id);
  }

  ScoreReport r;
  std::size_t label_ok = 0;
  std::size_t origin_ok = 0;
  std::size_t destination_ok = 0;
  for (const auto& a : truth.authors) {
    for (const auto& p : a.persons) {
      ++r.persons;
      std::map<std::string, std::size_t> votes;
      for (const auto& pub : p.pub_ids) ++votes[repaired.records[row_of_pub.at(pub)].author_id];
      const auto& [revised, count] = *std::max_element(
          votes.begin(), votes.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
      const bool exact = votes.size() == 1 && rows_per_revised[revised] == p.pub_ids.size();
      auto it = profile_of.find(revised);
      if (!exact || it == profile_of.end()) continue;
      label_ok += it->second->label == p.label;
      origin_ok += it->second->origin.country == p.origin;
      destination_ok += it->second->destination.country == p.destination;
    }
  }
  if (r.persons > 0) {
    r.label_accuracy = static_cast<double>(label_ok) / static_cast<double>(r.persons);
    r.origin_accuracy = static_cast<double>(origin_ok) / static_cast<double>(r.persons);
    r.destination_accuracy = static_cast<double>(destination_ok) / static_cast<double>(r.persons);
  }

  std::map<std::string, std::vector<std::size_t>> scope;
  for (std::size_t i = 0; i < input.records.size(); ++i) {
    const auto& original = input.records[i].author_id;
    const auto* at = truth.find(original);
    if ((at && at->merged) || repaired.records[i].author_id != original) scope[original];
  }
  for (std::size_t i = 0; i < input.records.size(); ++i) {
    auto it = scope.find(input.records[i].author_id);
    if (it != scope.end()) it->second.push_back(i);
  }
  r.pair_scope_ids = scope.size();
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (const auto& [id, rows] : scope) {
    for (std::size_t x = 0; x < rows.size(); ++x) {
      for (std::size_t y = x + 1; y < rows.size(); ++y) {
        const bool same_truth = person_of_row[rows[x]] == person_of_row[rows[y]];
        const bool same_pred = repaired.records[rows[x]].author_id == repaired.records[rows[y]].author_id;
        tp += same_truth && same_pred;
        fp += !same_truth && same_pred;
        fn += same_truth && !same_pred;
      }
    }
  }
  if (tp + fp > 0) r.pair_precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) r.pair_recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.pair_f1 = r.pair_precision + r.pair_recall > 0.0
                  ? 2.0 * r.pair_precision * r.pair_recall / (r.pair_precision + r.pair_recall)
                  : 0.0;
  for (const auto& [revised, originals] : originals_per_revised) r.cross_original_merges += originals.size() > 1;

  std::size_t fill_ok = 0;
  for (const auto& a : truth.authors) {
    for (const auto& m : a.masked) {
      ++r.masked_rows;
      fill_ok += repaired.records[row_of_pub.at(m.pub_id)].country == m.country;
    }
  }
  if (r.masked_rows > 0) r.fill_accuracy = static_cast<double>(fill_ok) / static_cast<double>(r.masked_rows);
  return r;
}

}  // namespace scholmig::synth

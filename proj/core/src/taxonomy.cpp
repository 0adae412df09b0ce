#include "scholmig/taxonomy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scholmig/csv.hpp"

namespace scholmig::taxonomy {

namespace {

struct SubfieldInfo {
  std::string_view name;
  MajorField major;
  int first_code;
  int last_code;
};

constexpr std::array<SubfieldInfo, kSubfieldCount> kSubfields{{
    {"agricultural_and_biological_sciences", MajorField::kLife, 1100, 1111},
    {"arts_and_humanities", MajorField::kSocial, 1200, 1213},
    {"biochemistry_genetics_and_molecular_biology", MajorField::kLife, 1300, 1315},
    {"business_management_and_accounting", MajorField::kSocial, 1400, 1410},
    {"chemical_engineering", MajorField::kPhysical, 1500, 1508},
    {"chemistry", MajorField::kPhysical, 1600, 1607},
    {"computer_science", MajorField::kPhysical, 1700, 1712},
    {"decision_sciences", MajorField::kSocial, 1800, 1804},
    {"earth_and_planetary_sciences", MajorField::kPhysical, 1900, 1913},
    {"economics_econometrics_and_finance", MajorField::kSocial, 2000, 2003},
    {"energy", MajorField::kPhysical, 2100, 2105},
    {"engineering", MajorField::kPhysical, 2200, 2216},
    {"environmental_science", MajorField::kPhysical, 2300, 2312},
    {"immunology_and_microbiology", MajorField::kLife, 2400, 2406},
    {"materials_science", MajorField::kPhysical, 2500, 2508},
    {"mathematics", MajorField::kPhysical, 2600, 2614},
    {"medicine", MajorField::kHealth, 2700, 2748},
    {"neuroscience", MajorField::kLife, 2800, 2809},
    {"nursing", MajorField::kHealth, 2900, 2923},
    {"pharmacology_toxicology_and_pharmaceutics", MajorField::kLife, 3000, 3005},
    {"physics_and_astronomy", MajorField::kPhysical, 3100, 3110},
    {"psychology", MajorField::kSocial, 3200, 3207},
    {"social_sciences", MajorField::kSocial, 3300, 3322},
    {"veterinary", MajorField::kHealth, 3400, 3404},
    {"dentistry", MajorField::kHealth, 3500, 3506},
    {"health_professions", MajorField::kHealth, 3600, 3616},
}};

constexpr std::array<std::string_view, 5> kFieldNames{"life", "social", "physical", "health",
                                                      "multidisciplinary"};

// Argmax tie order.
constexpr std::array<MajorField, kMajorFieldCount> kTieOrder{MajorField::kPhysical, MajorField::kLife,
                                                             MajorField::kHealth, MajorField::kSocial};

double max_z(const FieldFrequencies& f, const FieldStats& stats) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < kMajorFieldCount; ++m) {
    const double z = stats.stddev[m] > 0.0 ? (f.share[m] - stats.mean[m]) / stats.stddev[m] : 0.0;
    best = std::max(best, z);
  }
  return best;
}

}  // namespace

std::string_view to_string(Subfield s) { return kSubfields[index(s)].name; }
std::string_view to_string(MajorField m) { return kFieldNames[index(m)]; }
std::string_view to_string(FieldClass f) { return kFieldNames[static_cast<std::size_t>(f)]; }

std::optional<Subfield> subfield_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kSubfieldCount; ++i) {
    if (kSubfields[i].name == name) return subfield_at(i);
  }
  return std::nullopt;
}

std::optional<MajorField> major_field_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kMajorFieldCount; ++i) {
    if (kFieldNames[i] == name) return major_field_at(i);
  }
  return std::nullopt;
}

std::optional<FieldClass> field_class_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (kFieldNames[i] == name) return static_cast<FieldClass>(i);
  }
  return std::nullopt;
}

MajorField major_field_of(Subfield s) { return kSubfields[index(s)].major; }

FieldClass to_field_class(MajorField m) { return static_cast<FieldClass>(index(m)); }

AsjcTable AsjcTable::standard() {
  AsjcTable t;
  for (std::size_t i = 0; i < kSubfieldCount; ++i) {
    for (int code = kSubfields[i].first_code; code <= kSubfields[i].last_code; ++code) {
      t.add(code, subfield_at(i));
    }
  }
  return t;
}

void AsjcTable::add(int code, Subfield s) {
  auto [it, inserted] = codes_.emplace(code, s);
  if (!inserted && it->second != s) {
    throw DataError("ASJC code " + std::to_string(code) + " mapped to two subfields");
  }
}

AsjcTable AsjcTable::parse(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f) || f != std::vector<std::string>{"code", "subfield", "major_field"}) {
    throw SchemaMismatch("ASJC map header must be code,subfield,major_field");
  }
  AsjcTable t;
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    const auto where = "ASJC map line " + std::to_string(reader.line()) + ": ";
    if (f.size() != 3) throw DataError(where + "expected 3 fields");
    int code = 0;
    auto [p, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), code);
    if (ec != std::errc() || p != f[0].data() + f[0].size() || f[0].size() != 4) {
      throw DataError(where + "bad code '" + f[0] + "'");
    }
    auto sub = subfield_from_string(f[1]);
    if (!sub) throw DataError(where + "unknown subfield '" + f[1] + "'");
    auto major = major_field_from_string(f[2]);
    if (!major || *major != major_field_of(*sub)) {
      throw DataError(where + "subfield " + f[1] + " does not belong to major field '" + f[2] + "'");
    }
    t.add(code, *sub);
  }
  return t;
}

AsjcTable AsjcTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open ASJC map " + path.string());
  return parse(in);
}

void AsjcTable::write_csv(std::ostream& out) const {
  std::map<int, Subfield> sorted(codes_.begin(), codes_.end());
  CsvWriter w(out);
  w.row("code", "subfield", "major_field");
  for (auto [code, sub] : sorted) {
    w.row(std::to_string(code), to_string(sub), to_string(major_field_of(sub)));
  }
}

std::optional<Subfield> AsjcTable::lookup(int code) const {
  auto it = codes_.find(code);
  if (it == codes_.end()) return std::nullopt;
  return it->second;
}

std::int64_t SubjectCounts::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

SubjectCounts subject_counts(const AuthorDossier& dossier, const AsjcTable& table) {
  SubjectCounts out;
  std::set<std::pair<std::string_view, Subfield>> annotations;
  for (const auto& r : dossier.records) {
    for (int code : r.asjc_codes) {
      if (auto sub = table.lookup(code)) {
        annotations.emplace(r.pub_id, *sub);
      } else {
        ++out.ignored_codes;
      }
    }
  }
  for (const auto& [pub, sub] : annotations) ++out.counts[index(sub)];
  return out;
}

FieldFrequencies field_frequencies(const AuthorDossier& dossier, const AsjcTable& table) {
  const auto counts = subject_counts(dossier, table);
  const auto total = counts.total();
  if (total == 0) throw NoSubjectData("author " + dossier.author_id + " has no coded records");
  FieldFrequencies f;
  for (std::size_t d = 0; d < kSubfieldCount; ++d) {
    f.share[index(major_field_of(subfield_at(d)))] += static_cast<double>(counts.counts[d]);
  }
  for (auto& s : f.share) s /= static_cast<double>(total);
  return f;
}

FieldStats compute_field_stats(std::span<const FieldFrequencies> all) {
  if (all.empty()) throw std::invalid_argument("compute_field_stats: empty population");
  FieldStats stats;
  const double n = static_cast<double>(all.size());
  for (const auto& f : all) {
    for (std::size_t m = 0; m < kMajorFieldCount; ++m) stats.mean[m] += f.share[m];
  }
  for (auto& mu : stats.mean) mu /= n;
  for (const auto& f : all) {
    for (std::size_t m = 0; m < kMajorFieldCount; ++m) {
      const double dev = f.share[m] - stats.mean[m];
      stats.stddev[m] += dev * dev;
    }
  }
  for (auto& s : stats.stddev) s = std::sqrt(s / n);
  return stats;
}

FieldAssignment classify_major_field(const FieldFrequencies& f, const FieldStats& stats, double alpha) {
  FieldAssignment out;
  for (std::size_t m = 0; m < kMajorFieldCount; ++m) {
    out.z[m] = stats.stddev[m] > 0.0 ? (f.share[m] - stats.mean[m]) / stats.stddev[m] : 0.0;
  }
  out.max_z = *std::max_element(out.z.begin(), out.z.end());
  out.tie = std::count(out.z.begin(), out.z.end(), out.max_z) > 1;
  if (out.max_z > alpha) {
    for (auto m : kTieOrder) {
      if (out.z[index(m)] == out.max_z) {
        out.field = to_field_class(m);
        break;
      }
    }
  }
  return out;
}

double multidisciplinary_share(std::span<const FieldFrequencies> all, const FieldStats& stats, double alpha) {
  if (all.empty()) return 0.0;
  std::size_t multi = 0;
  for (const auto& f : all) {
    if (max_z(f, stats) <= alpha) ++multi;
  }
  return static_cast<double>(multi) / static_cast<double>(all.size());
}

double calibrate_alpha(std::span<const FieldFrequencies> all, const FieldStats& stats, double target_share,
                       double resolution) {
  if (all.empty()) throw std::invalid_argument("calibrate_alpha: empty population");
  if (!(target_share >= 0.0 && target_share <= 1.0)) {
    throw std::invalid_argument("calibrate_alpha: target share must lie in [0, 1]");
  }
  if (!(resolution > 0.0)) throw std::invalid_argument("calibrate_alpha: resolution must be positive");

  std::vector<double> maxima;
  maxima.reserve(all.size());
  for (const auto& f : all) maxima.push_back(max_z(f, stats));
  std::sort(maxima.begin(), maxima.end());
  const double n = static_cast<double>(maxima.size());
  auto share_at = [&](double alpha) {
    return static_cast<double>(std::upper_bound(maxima.begin(), maxima.end(), alpha) - maxima.begin()) / n;
  };

  double lo = maxima.front() - resolution;  // share 0
  double hi = maxima.back() + resolution;   // share 1
  if (target_share <= 0.0) return lo;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (share_at(mid) >= target_share) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double achieved = share_at(hi);
  if (std::abs(achieved - target_share) > 0.01) {
    throw DataError("multidisciplinary share " + std::to_string(target_share) +
                    " is unattainable: nearest achievable share is " + std::to_string(achieved));
  }
  return hi;
}

DisciplineVector normalized_contribution(const AuthorDossier& dossier, const AsjcTable& table) {
  const auto counts = subject_counts(dossier, table);
  const auto total = counts.total();
  if (total == 0) throw NoSubjectData("author " + dossier.author_id + " has no coded records");
  DisciplineVector v;
  for (std::size_t d = 0; d < kSubfieldCount; ++d) {
    v.nc[d] = static_cast<double>(counts.counts[d]) / static_cast<double>(total);
  }
  return v;
}

double normalized_count(std::span<const DisciplineVector> vectors, Subfield d) {
  double p = 0.0;
  for (const auto& v : vectors) p += v[d];
  return p;
}

}  // namespace scholmig::taxonomy

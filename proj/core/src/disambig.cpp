#include "scholmig/disambig.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "scholmig/csv.hpp"
#include "scholmig/error.hpp"
#include "scholmig/text.hpp"

namespace scholmig::disambig {

namespace {

struct Traits {
  std::vector<std::string> tokens;  // sorted, unique
  std::vector<int> codes;           // sorted, unique
  Country country;
  int year = 0;
};

Traits traits_of(const AuthorshipRecord& r) {
  Traits t;
  t.tokens = tokenize(r.affiliation_text);
  std::sort(t.tokens.begin(), t.tokens.end());
  t.tokens.erase(std::unique(t.tokens.begin(), t.tokens.end()), t.tokens.end());
  t.codes = r.asjc_codes;
  std::sort(t.codes.begin(), t.codes.end());
  t.codes.erase(std::unique(t.codes.begin(), t.codes.end()), t.codes.end());
  t.country = r.country;
  t.year = r.year;
  return t;
}

template <typename T>
double jaccard(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

double score(const Traits& a, const Traits& b, const PairScoreWeights& w) {
  const double year_gap = std::abs(a.year - b.year);
  const double s = w.affiliation * jaccard(a.tokens, b.tokens) +
                   w.country * (a.country == b.country ? 1.0 : 0.0) +
                   w.subject * jaccard(a.codes, b.codes) +
                   w.year * std::max(0.0, 1.0 - year_gap / 10.0);
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace

void SuspicionCriteria::validate() const {
  if (max_countries < 1 || max_publications < 1) {
    throw std::invalid_argument("suspicion thresholds must be >= 1");
  }
}

void PairScoreWeights::validate() const {
  for (double x : {affiliation, country, subject, year}) {
    if (!(x >= 0.0)) throw std::invalid_argument("pair-score weights must be non-negative");
  }
  if (std::abs(affiliation + country + subject + year - 1.0) > 1e-9) {
    throw std::invalid_argument("pair-score weights must sum to 1");
  }
}

bool flag_suspicious(const AuthorDossier& dossier, const SuspicionCriteria& criteria) {
  std::set<Country> countries;
  for (const auto& r : dossier.records) {
    if (r.country.known()) countries.insert(r.country);
  }
  return countries.size() > static_cast<std::size_t>(criteria.max_countries) ||
         dossier.publication_count() > static_cast<std::size_t>(criteria.max_publications);
}

double pair_score(const AuthorshipRecord& a, const AuthorshipRecord& b, const PairScoreWeights& w) {
  if (a.author_id != b.author_id) {
    throw std::invalid_argument("pair_score compares records of one author ID only");
  }
  return score(traits_of(a), traits_of(b), w);
}

DistanceMatrix distance_matrix(const AuthorDossier& dossier, const PairScoreWeights& w) {
  std::vector<Traits> traits;
  traits.reserve(dossier.records.size());
  for (const auto& r : dossier.records) traits.push_back(traits_of(r));
  DistanceMatrix m(traits.size());
  for (std::size_t i = 0; i < traits.size(); ++i) {
    for (std::size_t j = i + 1; j < traits.size(); ++j) {
      m.set(i, j, 1.0 - score(traits[i], traits[j], w));
    }
  }
  return m;
}

std::string affiliation_hash(const AuthorshipRecord& record) {
  std::string key = record.affiliation_text;
  key.push_back('\x1f');
  key.append(record.country.code());
  return to_hex(fnv1a64(key));
}

DisambigResult disambiguate_corpus(const Corpus& corpus, const DisambigOptions& options) {
  options.criteria.validate();
  options.weights.validate();
  if (!(options.cut_threshold > 0.0 && options.cut_threshold < 1.0)) {
    throw std::invalid_argument("cut threshold must lie in (0, 1)");
  }

  DisambigResult result;
  result.corpus = corpus;

  // (original_id, pub_id, affiliation_text, country) is unique after ingest.
  auto record_key = [](const AuthorshipRecord& r) {
    std::string k = r.author_id;
    for (std::string_view part : {std::string_view(r.pub_id), std::string_view(r.affiliation_text), r.country.code()}) {
      k.push_back('\x1f');
      k.append(part);
    }
    return k;
  };
  std::unordered_map<std::string, std::string> revised;

  const auto dossiers = group_by_author(corpus);
  result.report.total_ids = dossiers.size();
  for (const auto& dossier : dossiers) {
    if (!flag_suspicious(dossier, options.criteria)) continue;
    ++result.report.suspicious_ids;
    const auto clustering =
        cluster_records(distance_matrix(dossier, options.weights), options.cut_threshold, options.linkage);
    result.report.clusters_per_id[dossier.author_id] = clustering.cluster_count;
    result.report.clusters_produced += clustering.cluster_count;
    for (std::size_t i = 0; i < dossier.records.size(); ++i) {
      const auto& r = dossier.records[i];
      std::string id = clustering.cluster_count == 1
                           ? r.author_id
                           : r.author_id + "~" + std::to_string(clustering.labels[i] + 1);
      result.id_map.push_back({r.author_id, r.pub_id, affiliation_hash(r), id});
      revised.emplace(record_key(r), std::move(id));
    }
  }
  if (!revised.empty()) {
    for (auto& r : result.corpus.records) {
      if (auto it = revised.find(record_key(r)); it != revised.end()) r.author_id = it->second;
    }
  }
  spdlog::info("disambiguation: {} of {} author IDs suspicious, {} clusters", result.report.suspicious_ids,
               result.report.total_ids, result.report.clusters_produced);
  return result;
}

nlohmann::json to_json(const DisambigReport& report) {
  nlohmann::json j;
  j["total_ids"] = report.total_ids;
  j["suspicious_ids"] = report.suspicious_ids;
  j["suspicious_share"] = report.suspicious_share();
  j["clusters_produced"] = report.clusters_produced;
  j["clusters_per_id"] = report.clusters_per_id;
  return j;
}

void write_revised_id_map(const RevisedIdMap& map, std::ostream& out) {
  CsvWriter w(out);
  w.row("original_id", "pub_id", "affiliation_hash", "revised_id");
  for (const auto& e : map) w.row(e.original_id, e.pub_id, e.affiliation_hash, e.revised_id);
}

RevisedIdMap read_revised_id_map(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f) || f != std::vector<std::string>{"original_id", "pub_id", "affiliation_hash", "revised_id"}) {
    throw SchemaMismatch("revised ID map header must be original_id,pub_id,affiliation_hash,revised_id");
  }
  RevisedIdMap map;
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 4) throw DataError("revised ID map line " + std::to_string(reader.line()) + ": expected 4 fields");
    map.push_back({f[0], f[1], f[2], f[3]});
  }
  return map;
}

}  // namespace scholmig::disambig

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "scholmig/clustering.hpp"
#include "scholmig/records.hpp"

namespace scholmig::disambig {

/// Author IDs above either limit are treated as possibly covering more than
/// one person. Both comparisons are strict.
struct SuspicionCriteria {
  int max_countries = 6;
  int max_publications = 292;

  void validate() const;
};

/// Weights of the four record traits compared by pair_score.
struct PairScoreWeights {
  double affiliation = 0.4;  ///< Jaccard of affiliation token sets
  double country = 0.2;      ///< country equality
  double subject = 0.3;      ///< Jaccard of ASJC code sets
  double year = 0.1;         ///< max(0, 1 - |year gap| / 10)

  /// Non-negative and summing to 1 within 1e-9; throws std::invalid_argument.
  void validate() const;
};

struct DisambigOptions {
  SuspicionCriteria criteria;
  PairScoreWeights weights;
  double cut_threshold = 0.5;
  Linkage linkage = Linkage::kAverage;
};

bool flag_suspicious(const AuthorDossier& dossier, const SuspicionCriteria& criteria);

/// Weighted trait similarity in [0, 1]; symmetric. Both records must carry
/// the same author_id (std::invalid_argument otherwise). Two empty token or
/// code sets count as identical.
double pair_score(const AuthorshipRecord& a, const AuthorshipRecord& b, const PairScoreWeights& w);

/// 1 - pair_score over the dossier's records, in dossier order.
DistanceMatrix distance_matrix(const AuthorDossier& dossier, const PairScoreWeights& w);

/// Stable per-record key used in the revised-ID map.
std::string affiliation_hash(const AuthorshipRecord& record);

struct RevisedIdEntry {
  std::string original_id;
  std::string pub_id;
  std::string affiliation_hash;
  std::string revised_id;

  friend bool operator==(const RevisedIdEntry&, const RevisedIdEntry&) = default;
};

/// One entry per record of a suspicious dossier. Records absent from the map
/// keep their original ID.
using RevisedIdMap = std::vector<RevisedIdEntry>;

struct DisambigReport {
  std::size_t total_ids = 0;
  std::size_t suspicious_ids = 0;
  std::size_t clusters_produced = 0;
  std::map<std::string, std::size_t> clusters_per_id;

  double suspicious_share() const {
    return total_ids ? static_cast<double>(suspicious_ids) / static_cast<double>(total_ids) : 0.0;
  }
};

struct DisambigResult {
  Corpus corpus;
  RevisedIdMap id_map;
  DisambigReport report;
};

/// Re-clusters the records of every suspicious dossier and issues
/// `<original>~<k>` IDs when a dossier splits. Records are never moved across
/// original IDs and non-suspicious records are left untouched. The output
/// corpus keeps the input record order.
DisambigResult disambiguate_corpus(const Corpus& corpus, const DisambigOptions& options = {});

nlohmann::json to_json(const DisambigReport& report);

/// CSV `original_id,pub_id,affiliation_hash,revised_id`.
void write_revised_id_map(const RevisedIdMap& map, std::ostream& out);
RevisedIdMap read_revised_id_map(std::istream& in);

}  // namespace scholmig::disambig

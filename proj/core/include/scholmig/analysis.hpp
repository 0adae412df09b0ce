#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scholmig/country.hpp"
#include "scholmig/metrics.hpp"
#include "scholmig/mobility.hpp"
#include "scholmig/records.hpp"
#include "scholmig/taxonomy.hpp"

namespace scholmig {

struct YearWindow {
  int first = 0;
  int last = 0;

  friend bool operator==(const YearWindow&, const YearWindow&) = default;
};

struct AnalysisConfig {
  Country focal = Country::from_code("RU");
  int snapshot_year = 2020;
  double alpha = 1.0;
  /// When set, alpha is calibrated to this multidisciplinary share instead.
  std::optional<double> target_multidisciplinary_share;
  int padding = 2;
  double min_support = metrics::kDefaultMinSupport;
  mobility::FlowOptions flows;
  /// NMR years; defaults to the span of active years in the corpus.
  std::optional<YearWindow> window;
};

/// Field classification of every dossier; entries are empty for researchers
/// without subject data.
struct FieldClassification {
  std::vector<std::optional<taxonomy::FieldFrequencies>> frequencies;
  std::vector<std::optional<taxonomy::FieldAssignment>> assignments;
  std::vector<std::optional<taxonomy::DisciplineVector>> disciplines;
  std::optional<taxonomy::FieldStats> stats;
  double alpha = 1.0;
  std::size_t without_subjects = 0;
};

FieldClassification classify_fields(std::span<const AuthorDossier> dossiers, const taxonomy::AsjcTable& table,
                                    double alpha, std::optional<double> target_share = std::nullopt);

std::vector<mobility::AuthorMobility> classify_all_mobility(std::span<const AuthorDossier> dossiers, Country focal);

/// Span of years with at least one known-country record.
std::optional<YearWindow> active_window(std::span<const mobility::AuthorMobility> mobility);

struct AnalysisResult {
  std::vector<std::string> author_ids;
  std::vector<mobility::AuthorMobility> mobility;
  FieldClassification fields;
  std::vector<metrics::CitationSummary> citations;
  std::vector<std::optional<metrics::CitationClass>> citation_classes;  ///< migrants with a field
  metrics::FieldMeans migrant_means;
  metrics::FieldMeans all_means;
  std::optional<metrics::CitationClassBoundaries> boundaries;
  std::optional<YearWindow> window;
  std::vector<metrics::NmrPoint> nmr;
  std::vector<metrics::FnbdResult> fnbd;
  std::vector<metrics::ClassComposition> class_composition;
  std::vector<mobility::FlowEdge> flows;
  std::vector<mobility::FlowEdge> moves;
  std::array<std::size_t, mobility::kLabelCount> label_counts{};

  std::vector<mobility::MobilityProfile> profiles() const;
  std::vector<std::optional<taxonomy::FieldClass>> field_classes() const;
};

AnalysisResult analyze_corpus(const Corpus& corpus, const taxonomy::AsjcTable& table, const AnalysisConfig& config);

}  // namespace scholmig

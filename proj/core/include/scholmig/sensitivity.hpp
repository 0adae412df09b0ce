#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scholmig/analysis.hpp"
#include "scholmig/metrics.hpp"
#include "scholmig/records.hpp"
#include "scholmig/taxonomy.hpp"

namespace scholmig::sensitivity {

struct ExclusionPlan {
  std::vector<double> proportions;  ///< ascending, each in [0, 1)
  int runs_per_proportion = 10;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument.
  void validate() const;

  /// 0.0, 0.1, ..., 0.9.
  static ExclusionPlan tenths(int runs, std::uint64_t seed);
  /// 0.0, 0.2, ..., 0.8.
  static ExclusionPlan fifths(int runs, std::uint64_t seed);
};

/// Removes floor(proportion * N) uniformly chosen records; survivors keep
/// their order. Throws std::invalid_argument unless 0 <= proportion < 1.
Corpus exclude_random(const Corpus& corpus, double proportion, std::uint64_t seed);

/// Seed of one (proportion, run) cell of a plan.
std::uint64_t run_seed(std::uint64_t plan_seed, std::size_t proportion_index, int run);

/// NMR points only; cheaper than a full analysis.
std::vector<metrics::NmrPoint> nmr_only(const Corpus& corpus, const AnalysisConfig& config);

struct NmrRun {
  double proportion = 0.0;
  int run = 0;
  std::vector<metrics::NmrPoint> series;
};

/// Spread of NMR across the runs of one proportion.
struct VarianceSummary {
  double proportion = 0.0;
  std::map<int, double> per_year;  ///< population variance across runs
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct NmrStudy {
  std::optional<YearWindow> window;
  std::vector<metrics::NmrPoint> base;
  std::vector<NmrRun> runs;
  std::vector<VarianceSummary> variance;
};

/// Reruns mobility and NMR on each excluded corpus. The year window is taken
/// from the full corpus so that runs stay comparable.
NmrStudy nmr_exclusion_study(const Corpus& corpus, const AnalysisConfig& config, const ExclusionPlan& plan);

struct PaddingSweep {
  std::vector<int> paddings;
  std::vector<std::vector<metrics::NmrPoint>> series;  ///< aligned with paddings
  std::map<int, double> spread;                         ///< max - min NMR per year
  bool sign_pattern_preserved = true;
};

/// Throws std::invalid_argument on an empty or negative padding list.
PaddingSweep padding_sweep(const Corpus& corpus, const AnalysisConfig& config, std::span<const int> paddings);

struct FnbdRun {
  double proportion = 0.0;
  int run = 0;
  std::vector<metrics::FnbdResult> results;
};

struct FnbdStability {
  std::string discipline;
  std::optional<double> base;
  int positive = 0;
  int negative = 0;
  int undefined = 0;
  bool unstable = false;  ///< some run disagrees in sign with the base value
};

struct FnbdStudy {
  std::vector<metrics::FnbdResult> base;
  std::vector<FnbdRun> runs;
  std::vector<FnbdStability> stability;
};

FnbdStudy fnbd_exclusion_study(const Corpus& corpus, const taxonomy::AsjcTable& table, const AnalysisConfig& config,
                               const ExclusionPlan& plan);

/// `proportion,run,year_or_discipline,value`
void write_nmr_study_csv(const NmrStudy& study, std::ostream& out);
/// `proportion,run,year_or_discipline,value`
void write_fnbd_study_csv(const FnbdStudy& study, std::ostream& out);
/// `padding,year,I,E,M,nmr`
void write_padding_sweep_csv(const PaddingSweep& sweep, std::ostream& out);

}  // namespace scholmig::sensitivity

#include "scholmig/sensitivity.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "scholmig/csv.hpp"
#include "scholmig/mobility.hpp"
#include "scholmig/random.hpp"

namespace scholmig::sensitivity {

void ExclusionPlan::validate() const {
  if (proportions.empty()) throw std::invalid_argument("exclusion plan has no proportions");
  if (runs_per_proportion < 1) throw std::invalid_argument("exclusion plan needs at least one run per proportion");
  for (double p : proportions) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument(fmt::format("exclusion proportion {} outside [0, 1)", p));
  }
  if (!std::is_sorted(proportions.begin(), proportions.end())) {
    throw std::invalid_argument("exclusion proportions must be ascending");
  }
}

ExclusionPlan ExclusionPlan::tenths(int runs, std::uint64_t seed) {
  ExclusionPlan plan{{}, runs, seed};
  for (int i = 0; i < 10; ++i) plan.proportions.push_back(i / 10.0);
  return plan;
}

ExclusionPlan ExclusionPlan::fifths(int runs, std::uint64_t seed) {
  ExclusionPlan plan{{}, runs, seed};
  for (int i = 0; i < 5; ++i) plan.proportions.push_back(i / 5.0);
  return plan;
}

Corpus exclude_random(const Corpus& corpus, double proportion, std::uint64_t seed) {
  if (!(proportion >= 0.0 && proportion < 1.0)) {
    throw std::invalid_argument(fmt::format("exclusion proportion {} outside [0, 1)", proportion));
  }
  const std::size_t n = corpus.records.size();
  const auto drop = static_cast<std::size_t>(std::floor(proportion * static_cast<double>(n)));
  if (drop == 0) return corpus;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < drop; ++i) {
    std::swap(order[i], order[i + rng.index(n - i)]);
  }
  std::vector<bool> removed(n, false);
  for (std::size_t i = 0; i < drop; ++i) removed[order[i]] = true;
  Corpus out;
  out.snapshot_year = corpus.snapshot_year;
  out.records.reserve(n - drop);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) out.records.push_back(corpus.records[i]);
  }
  return out;
}

std::uint64_t run_seed(std::uint64_t plan_seed, std::size_t proportion_index, int run) {
  return mix_seed(mix_seed(plan_seed, proportion_index), static_cast<std::uint64_t>(run));
}

namespace {

std::vector<metrics::NmrPoint> nmr_in_window(const Corpus& corpus, const AnalysisConfig& config,
                                             const std::optional<YearWindow>& window) {
  if (!window) return {};
  const auto dossiers = group_by_author(corpus);
  const auto mobility = classify_all_mobility(dossiers, config.focal);
  std::vector<mobility::MobilityProfile> profiles;
  std::vector<mobility::YearCountrySeries> series;
  profiles.reserve(mobility.size());
  series.reserve(mobility.size());
  for (const auto& m : mobility) {
    profiles.push_back(m.profile);
    series.push_back(m.series);
  }
  return metrics::nmr_series(profiles, series, config.focal, window->first, window->last, config.padding);
}

std::optional<YearWindow> window_of(const Corpus& corpus, const AnalysisConfig& config) {
  if (config.window) return config.window;
  const auto dossiers = group_by_author(corpus);
  return active_window(classify_all_mobility(dossiers, config.focal));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

VarianceSummary summarize(double proportion, std::span<const NmrRun> runs) {
  VarianceSummary s;
  s.proportion = proportion;
  std::map<int, std::vector<double>> by_year;
  for (const auto& r : runs) {
    for (const auto& p : r.series) by_year[p.year].push_back(p.nmr);
  }
  std::vector<double> variances;
  for (const auto& [year, values] : by_year) {
    // Shifted by the first value so identical runs give exactly zero.
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    double sq = 0.0;
    for (double v : values) {
      sum += v - values.front();
      sq += (v - values.front()) * (v - values.front());
    }
    s.per_year[year] = std::max(0.0, sq / n - (sum / n) * (sum / n));
    variances.push_back(s.per_year[year]);
  }
  if (!variances.empty()) {
    s.mean = std::accumulate(variances.begin(), variances.end(), 0.0) / static_cast<double>(variances.size());
    s.median = quantile(variances, 0.5);
    s.q1 = quantile(variances, 0.25);
    s.q3 = quantile(variances, 0.75);
  }
  return s;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

std::vector<metrics::NmrPoint> nmr_only(const Corpus& corpus, const AnalysisConfig& config) {
  return nmr_in_window(corpus, config, window_of(corpus, config));
}

NmrStudy nmr_exclusion_study(const Corpus& corpus, const AnalysisConfig& config, const ExclusionPlan& plan) {
  plan.validate();
  NmrStudy study;
  study.window = window_of(corpus, config);
  study.base = nmr_in_window(corpus, config, study.window);
  for (std::size_t pi = 0; pi < plan.proportions.size(); ++pi) {
    const double p = plan.proportions[pi];
    const std::size_t first = study.runs.size();
    for (int run = 0; run < plan.runs_per_proportion; ++run) {
      const auto excluded = exclude_random(corpus, p, run_seed(plan.seed, pi, run));
      study.runs.push_back({p, run, nmr_in_window(excluded, config, study.window)});
    }
    study.variance.push_back(summarize(p, std::span(study.runs).subspan(first)));
    spdlog::debug("nmr exclusion {}: mean per-year variance {}", p, study.variance.back().mean);
  }
  return study;
}

PaddingSweep padding_sweep(const Corpus& corpus, const AnalysisConfig& config, std::span<const int> paddings) {
  if (paddings.empty()) throw std::invalid_argument("padding sweep needs at least one padding");
  for (int p : paddings) {
    if (p < 0) throw std::invalid_argument(fmt::format("padding {} is negative", p));
  }
  PaddingSweep sweep;
  sweep.paddings.assign(paddings.begin(), paddings.end());
  const auto dossiers = group_by_author(corpus);
  const auto mobility = classify_all_mobility(dossiers, config.focal);
  const auto window = config.window ? config.window : active_window(mobility);
  std::vector<mobility::MobilityProfile> profiles;
  std::vector<mobility::YearCountrySeries> series;
  for (const auto& m : mobility) {
    profiles.push_back(m.profile);
    series.push_back(m.series);
  }
  std::map<int, std::pair<double, double>> range;
  std::map<int, std::set<int>> signs;
  for (int padding : paddings) {
    std::vector<metrics::NmrPoint> points;
    if (window) points = metrics::nmr_series(profiles, series, config.focal, window->first, window->last, padding);
    for (const auto& p : points) {
      auto [it, fresh] = range.try_emplace(p.year, p.nmr, p.nmr);
      if (!fresh) {
        it->second.first = std::min(it->second.first, p.nmr);
        it->second.second = std::max(it->second.second, p.nmr);
      }
      signs[p.year].insert(sign_of(p.nmr));
    }
    sweep.series.push_back(std::move(points));
  }
  for (const auto& [year, mm] : range) sweep.spread[year] = mm.second - mm.first;
  sweep.sign_pattern_preserved =
      std::all_of(signs.begin(), signs.end(), [](const auto& kv) { return kv.second.size() == 1; });
  return sweep;
}

FnbdStudy fnbd_exclusion_study(const Corpus& corpus, const taxonomy::AsjcTable& table, const AnalysisConfig& config,
                               const ExclusionPlan& plan) {
  plan.validate();
  FnbdStudy study;
  study.base = analyze_corpus(corpus, table, config).fnbd;
  for (const auto& b : study.base) study.stability.push_back({b.discipline, b.fnbd});
  for (std::size_t pi = 0; pi < plan.proportions.size(); ++pi) {
    const double p = plan.proportions[pi];
    for (int run = 0; run < plan.runs_per_proportion; ++run) {
      const auto excluded = exclude_random(corpus, p, run_seed(plan.seed, pi, run));
      auto results = analyze_corpus(excluded, table, config).fnbd;
      for (std::size_t d = 0; d < results.size(); ++d) {
        auto& s = study.stability[d];
        const auto& v = results[d].fnbd;
        if (!v) {
          ++s.undefined;
        } else if (*v > 0.0) {
          ++s.positive;
        } else if (*v < 0.0) {
          ++s.negative;
        }
        if (!s.base || !v || sign_of(*v) != sign_of(*s.base)) s.unstable = true;
      }
      study.runs.push_back({p, run, std::move(results)});
    }
  }
  return study;
}

void write_nmr_study_csv(const NmrStudy& study, std::ostream& out) {
  CsvWriter w(out);
  w.row("proportion", "run", "year_or_discipline", "value");
  for (const auto& r : study.runs) {
    for (const auto& p : r.series) {
      w.row(format_number(r.proportion), std::to_string(r.run), std::to_string(p.year), format_number(p.nmr));
    }
  }
}

void write_fnbd_study_csv(const FnbdStudy& study, std::ostream& out) {
  CsvWriter w(out);
  w.row("proportion", "run", "year_or_discipline", "value");
  for (const auto& r : study.runs) {
    for (const auto& f : r.results) {
      w.row(format_number(r.proportion), std::to_string(r.run), f.discipline,
            f.fnbd ? format_number(*f.fnbd) : std::string());
    }
  }
}

void write_padding_sweep_csv(const PaddingSweep& sweep, std::ostream& out) {
  CsvWriter w(out);
  w.row("padding", "year", "I", "E", "M", "nmr");
  for (std::size_t i = 0; i < sweep.paddings.size(); ++i) {
    for (const auto& p : sweep.series[i]) {
      w.row(std::to_string(sweep.paddings[i]), std::to_string(p.year), std::to_string(p.immigrants),
            std::to_string(p.emigrants), format_number(p.population), format_number(p.nmr));
    }
  }
}

}  // namespace scholmig::sensitivity

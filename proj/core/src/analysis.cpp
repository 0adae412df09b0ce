#include "scholmig/analysis.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

namespace scholmig {

FieldClassification classify_fields(std::span<const AuthorDossier> dossiers, const taxonomy::AsjcTable& table,
                                    double alpha, std::optional<double> target_share) {
  FieldClassification out;
  out.frequencies.resize(dossiers.size());
  out.assignments.resize(dossiers.size());
  out.disciplines.resize(dossiers.size());
  std::vector<taxonomy::FieldFrequencies> observed;
  std::size_t ignored = 0;
  for (std::size_t i = 0; i < dossiers.size(); ++i) {
    const auto counts = taxonomy::subject_counts(dossiers[i], table);
    ignored += counts.ignored_codes;
    if (counts.total() == 0) {
      ++out.without_subjects;
      continue;
    }
    out.frequencies[i] = taxonomy::field_frequencies(dossiers[i], table);
    out.disciplines[i] = taxonomy::normalized_contribution(dossiers[i], table);
    observed.push_back(*out.frequencies[i]);
  }
  if (ignored > 0) spdlog::warn("{} subject codes not in the ASJC table were ignored", ignored);
  if (out.without_subjects > 0) spdlog::info("{} researchers have no subject data", out.without_subjects);
  out.alpha = alpha;
  if (observed.empty()) return out;
  out.stats = taxonomy::compute_field_stats(observed);
  if (target_share) out.alpha = taxonomy::calibrate_alpha(observed, *out.stats, *target_share);
  std::size_t ties = 0;
  for (std::size_t i = 0; i < dossiers.size(); ++i) {
    if (!out.frequencies[i]) continue;
    out.assignments[i] = taxonomy::classify_major_field(*out.frequencies[i], *out.stats, out.alpha);
    if (out.assignments[i]->tie) ++ties;
  }
  if (ties > 0) spdlog::info("{} field assignments resolved a Z-score tie", ties);
  return out;
}

std::vector<mobility::AuthorMobility> classify_all_mobility(std::span<const AuthorDossier> dossiers, Country focal) {
  std::vector<mobility::AuthorMobility> out;
  out.reserve(dossiers.size());
  for (const auto& d : dossiers) out.push_back(mobility::analyze_mobility(d, focal));
  return out;
}

std::optional<YearWindow> active_window(std::span<const mobility::AuthorMobility> mobility) {
  std::optional<YearWindow> w;
  for (const auto& m : mobility) {
    const auto years = m.series.years();
    if (years.empty()) continue;
    if (!w) {
      w = YearWindow{years.front().year, years.back().year};
    } else {
      w->first = std::min(w->first, years.front().year);
      w->last = std::max(w->last, years.back().year);
    }
  }
  return w;
}

std::vector<mobility::MobilityProfile> AnalysisResult::profiles() const {
  std::vector<mobility::MobilityProfile> out;
  out.reserve(mobility.size());
  for (const auto& m : mobility) out.push_back(m.profile);
  return out;
}

std::vector<std::optional<taxonomy::FieldClass>> AnalysisResult::field_classes() const {
  std::vector<std::optional<taxonomy::FieldClass>> out;
  out.reserve(fields.assignments.size());
  for (const auto& a : fields.assignments) {
    out.push_back(a ? std::optional(a->field) : std::nullopt);
  }
  return out;
}

AnalysisResult analyze_corpus(const Corpus& corpus, const taxonomy::AsjcTable& table, const AnalysisConfig& config) {
  const auto dossiers = group_by_author(corpus);
  AnalysisResult r;
  r.author_ids.reserve(dossiers.size());
  for (const auto& d : dossiers) r.author_ids.push_back(d.author_id);

  r.fields = classify_fields(dossiers, table, config.alpha, config.target_multidisciplinary_share);
  r.mobility = classify_all_mobility(dossiers, config.focal);
  for (const auto& m : r.mobility) ++r.label_counts[static_cast<std::size_t>(m.profile.label)];

  const auto fields = r.field_classes();
  std::vector<metrics::RatedResearcher> rated;
  rated.reserve(dossiers.size());
  for (std::size_t i = 0; i < dossiers.size(); ++i) {
    r.citations.push_back(metrics::annual_citation_rate(dossiers[i], config.snapshot_year));
    rated.push_back({fields[i], r.mobility[i].profile.label, r.citations[i].annual_rate});
  }
  r.migrant_means = metrics::field_mean_rates(rated, metrics::RateScope::kMigrants);
  r.all_means = metrics::field_mean_rates(rated, metrics::RateScope::kAll);

  std::vector<double> migrant_rates;
  for (std::size_t i = 0; i < dossiers.size(); ++i) {
    if (!fields[i]) continue;
    r.citations[i].field_normalized_rate =
        metrics::field_normalized_rate(r.citations[i].annual_rate, *fields[i], r.migrant_means);
    if (mobility::is_migrant(rated[i].label)) migrant_rates.push_back(r.citations[i].field_normalized_rate);
  }
  r.citation_classes.resize(dossiers.size());
  std::vector<metrics::ClassifiedMigrant> classified;
  if (!migrant_rates.empty()) {
    r.boundaries = metrics::CitationClassBoundaries::fit(migrant_rates);
    for (std::size_t i = 0; i < dossiers.size(); ++i) {
      if (!fields[i] || !mobility::is_migrant(rated[i].label)) continue;
      const auto c = metrics::citation_class(r.citations[i].field_normalized_rate, *r.boundaries);
      r.citation_classes[i] = c;
      const auto& p = r.mobility[i].profile;
      classified.push_back({p.label, p.origin.country, p.destination.country, c});
    }
  }
  r.class_composition = metrics::citation_class_composition(classified);

  const auto profiles = r.profiles();
  std::vector<mobility::YearCountrySeries> series;
  series.reserve(r.mobility.size());
  for (const auto& m : r.mobility) series.push_back(m.series);
  r.window = config.window ? config.window : active_window(r.mobility);
  if (r.window) {
    r.nmr = metrics::nmr_series(profiles, series, config.focal, r.window->first, r.window->last, config.padding);
  }

  std::vector<mobility::MobilityLabel> labels;
  labels.reserve(profiles.size());
  for (const auto& p : profiles) labels.push_back(p.label);
  r.fnbd = metrics::fnbd_by_discipline(labels, r.fields.disciplines, config.min_support);

  r.flows = mobility::build_flow_network(profiles, config.focal, config.flows, fields);
  r.moves = mobility::build_move_network(profiles, config.focal, config.flows, fields);
  return r;
}

}  // namespace scholmig

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scholmig/country.hpp"
#include "scholmig/geoinfer.hpp"
#include "scholmig/mobility.hpp"
#include "scholmig/records.hpp"
#include "scholmig/taxonomy.hpp"

namespace scholmig::synth {

using mobility::MobilityLabel;
using taxonomy::MajorField;

/// Researchers to plant per mobility label.
struct LabelCounts {
  std::array<int, mobility::kLabelCount> counts{};

  int& operator[](MobilityLabel l) { return counts[static_cast<std::size_t>(l)]; }
  int operator[](MobilityLabel l) const { return counts[static_cast<std::size_t>(l)]; }
  int total() const;
};

struct PartnerCountry {
  Country country;
  double propensity = 1.0;
};

std::vector<PartnerCountry> default_partners();

/// Physical sciences lead; a few subfields are rare.
std::array<double, taxonomy::kSubfieldCount> default_subfield_weights();

struct GeneratorConfig {
  LabelCounts labels;
  int first_year = 1996;
  int last_year = 2019;
  int snapshot_year = 2020;
  Country focal = Country::from_code("RU");
  std::vector<PartnerCountry> partners = default_partners();

  /// Mean annual citation rate per major field, indexed by MajorField.
  std::array<double, taxonomy::kMajorFieldCount> citation_means{4.3, 0.6, 6.5, 1.9};
  double citation_sigma = 0.8;  ///< log-scale spread

  std::array<double, taxonomy::kSubfieldCount> subfield_weights = default_subfield_weights();
  double secondary_subject_prob = 0.4;    ///< second subfield in the same field
  double cross_field_subject_prob = 0.2;  ///< extra subfield from another field
  double subject_retention = 0.8;         ///< chance a publication carries each extra code

  double merged_id_fraction = 0.0;        ///< merged-ID pairs per planted researcher
  double missing_country_fraction = 0.0;  ///< rows whose country is blanked
  double tie_year_fraction = 0.0;         ///< moves preceded by a two-country year

  /// First year in the destination for every planted emigrant.
  std::optional<int> emigrant_departure_year;

  std::string id_prefix = "syn";
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on a contradictory config.
  void validate() const;

  /// `n` researchers split over all seven labels in fixed shares.
  static GeneratorConfig with_population(int n, std::uint64_t seed);
};

struct PersonTruth {
  std::string key;  ///< prefix of the person's pub_ids
  MobilityLabel label = MobilityLabel::kNonMover;
  Country origin;
  Country destination;
  MajorField field = MajorField::kPhysical;
  double citation_rate = 0.0;
  std::vector<std::string> pub_ids;
};

struct MaskedRow {
  std::string pub_id;
  Country country;
};

struct AuthorTruth {
  std::string author_id;
  bool merged = false;
  std::vector<PersonTruth> persons;
  std::vector<MaskedRow> masked;
};

struct GroundTruth {
  std::vector<AuthorTruth> authors;  ///< sorted by author_id

  const AuthorTruth* find(std::string_view author_id) const;
  std::size_t person_count() const;
};

struct SyntheticCorpus {
  Corpus corpus;
  GroundTruth truth;
};

/// Deterministic in (config, gazetteer). Affiliation texts name a city and an
/// institution from the gazetteer but never a country.
SyntheticCorpus generate_corpus(const GeneratorConfig& config, const geoinfer::Gazetteer& gazetteer);

/// One JSON object per author_id.
void write_truth_jsonl(const GroundTruth& truth, std::ostream& out);
GroundTruth read_truth_jsonl(std::istream& in);

/// Affiliation texts built like the generator's, labeled with their country.
std::vector<geoinfer::LabeledAffiliation> labeled_affiliations(const geoinfer::Gazetteer& gazetteer, std::size_t n,
                                                               std::uint64_t seed);

struct ScoreReport {
  std::size_t persons = 0;
  double label_accuracy = 0.0;
  double origin_accuracy = 0.0;
  double destination_accuracy = 0.0;
  std::size_t pair_scope_ids = 0;  ///< planted-merged or split IDs
  double pair_precision = 1.0;
  double pair_recall = 1.0;
  double pair_f1 = 1.0;
  std::size_t cross_original_merges = 0;
  std::size_t masked_rows = 0;
  double fill_accuracy = 1.0;
};

nlohmann::json to_json(const ScoreReport& report);

/// `input` is the generated corpus and `repaired` the same rows after country
/// filling and disambiguation, in input order. `profiles` are keyed by
/// revised author_id. Throws DataError when the corpora do not line up with
/// each other or with the truth.
ScoreReport score_against_truth(const Corpus& input, const Corpus& repaired,
                                std::span<const mobility::MobilityProfile> profiles, const GroundTruth& truth);

}  // namespace scholmig::synth

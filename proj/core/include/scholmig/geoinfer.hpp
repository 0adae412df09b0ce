#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scholmig/country.hpp"
#include "scholmig/records.hpp"

namespace scholmig::geoinfer {

/// Entry classes, ordered by how strongly they identify a country.
enum class EntryClass : int { kInstitution = 1, kCity = 2, kCountryName = 3 };

struct GazetteerEntry {
  std::string token;  ///< normalized, possibly multi-word ("saint petersburg")
  Country country;
  int priority = 0;
};

/// Token-to-country knowledge base. A token may carry entries at several
/// priorities, but never two countries at the same priority.
class Gazetteer {
 public:
  struct Match {
    Country country;
    int priority;
  };

  /// Normalizes `token` and inserts it. Re-adding an identical entry is a
  /// no-op; a different country at an existing priority throws DataError.
  void add(std::string_view token, Country country, int priority);

  /// CSV with header `token,country,priority`.
  static Gazetteer parse(std::istream& in);
  static Gazetteer load(const std::filesystem::path& path);
  void write_csv(std::ostream& out) const;

  std::span<const Match> lookup(std::string_view normalized_token) const;

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t max_words() const { return max_words_; }

  /// Entries in insertion order.
  const std::vector<GazetteerEntry>& entries() const { return entries_; }

 private:
  std::unordered_map<std::string, std::vector<Match>> index_;
  std::vector<GazetteerEntry> entries_;
  std::size_t max_words_ = 0;
};

/// Invariant: country unknown <=> confidence == 0.
struct InferenceResult {
  Country country;
  double confidence = 0.0;
  std::optional<std::string> matched_token;
};

/// Pluggable text -> country contract. The gazetteer matcher is the shipped
/// implementation; a learned model can implement the same interface.
class CountryInferrer {
 public:
  virtual ~CountryInferrer() = default;
  virtual InferenceResult infer(std::string_view affiliation_text) const = 0;
};

/// Scans tokens left to right taking the longest gazetteer n-gram at each
/// position, then keeps the highest-priority matches. If those name more than
/// one country the result is UNKNOWN; the matcher never guesses.
InferenceResult infer_country(std::string_view affiliation_text, const Gazetteer& gazetteer);

class GazetteerInferrer final : public CountryInferrer {
 public:
  explicit GazetteerInferrer(const Gazetteer& gazetteer) : gazetteer_(gazetteer) {}
  GazetteerInferrer(Gazetteer&&) = delete;
  InferenceResult infer(std::string_view affiliation_text) const override {
    return infer_country(affiliation_text, gazetteer_);
  }

 private:
  const Gazetteer& gazetteer_;
};

struct FillReport {
  std::size_t unknown_before = 0;
  std::size_t filled = 0;
  std::size_t unfilled = 0;
};

/// Only rows whose country is UNKNOWN are touched; unresolved rows stay
/// UNKNOWN.
std::pair<Corpus, FillReport> fill_missing_countries(const Corpus& corpus, const CountryInferrer& inferrer);

struct LabeledAffiliation {
  std::string text;
  Country country;
};

/// Exact-match accuracy; UNKNOWN predictions count as misses. Throws
/// std::invalid_argument on an empty set.
double evaluate_inference(std::span<const LabeledAffiliation> labeled, const CountryInferrer& inferrer);

}  // namespace scholmig::geoinfer

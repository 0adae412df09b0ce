#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>

#include "scholmig/error.hpp"
#include "scholmig/records.hpp"

namespace scholmig::taxonomy {

inline constexpr std::size_t kSubfieldCount = 26;
inline constexpr std::size_t kMajorFieldCount = 4;

/// The 26 ASJC subject areas, in ASJC code order.
enum class Subfield : std::uint8_t {
  kAgriculturalBiological,
  kArtsHumanities,
  kBiochemistryGenetics,
  kBusinessManagement,
  kChemicalEngineering,
  kChemistry,
  kComputerScience,
  kDecisionSciences,
  kEarthPlanetary,
  kEconomics,
  kEnergy,
  kEngineering,
  kEnvironmentalScience,
  kImmunologyMicrobiology,
  kMaterialsScience,
  kMathematics,
  kMedicine,
  kNeuroscience,
  kNursing,
  kPharmacology,
  kPhysicsAstronomy,
  kPsychology,
  kSocialSciences,
  kVeterinary,
  kDentistry,
  kHealthProfessions,
};

enum class MajorField : std::uint8_t { kLife, kSocial, kPhysical, kHealth };

/// Researcher-level field: one of the four major fields or the
/// multidisciplinary group.
enum class FieldClass : std::uint8_t { kLife, kSocial, kPhysical, kHealth, kMultidisciplinary };

inline constexpr std::array<FieldClass, 5> kFieldClasses{FieldClass::kLife, FieldClass::kSocial,
                                                         FieldClass::kPhysical, FieldClass::kHealth,
                                                         FieldClass::kMultidisciplinary};

std::string_view to_string(Subfield s);
std::string_view to_string(MajorField m);
std::string_view to_string(FieldClass f);
std::optional<Subfield> subfield_from_string(std::string_view name);
std::optional<MajorField> major_field_from_string(std::string_view name);
std::optional<FieldClass> field_class_from_string(std::string_view name);

MajorField major_field_of(Subfield s);
FieldClass to_field_class(MajorField m);
constexpr std::size_t index(Subfield s) { return static_cast<std::size_t>(s); }
constexpr std::size_t index(MajorField m) { return static_cast<std::size_t>(m); }
inline Subfield subfield_at(std::size_t i) { return static_cast<Subfield>(i); }
inline MajorField major_field_at(std::size_t i) { return static_cast<MajorField>(i); }

/// ASJC code -> subfield. Major fields follow from the subfield.
class AsjcTable {
 public:
  /// The standard ASJC code ranges for the 26 subject areas. Code 1000
  /// (multidisciplinary journals) maps to no subfield.
  static AsjcTable standard();

  /// CSV `code,subfield,major_field`. The major field must agree with the
  /// subfield's; throws DataError otherwise.
  static AsjcTable parse(std::istream& in);
  static AsjcTable load(const std::filesystem::path& path);
  void write_csv(std::ostream& out) const;

  std::optional<Subfield> lookup(int code) const;
  std::size_t size() const { return codes_.size(); }

  friend bool operator==(const AsjcTable&, const AsjcTable&) = default;

 private:
  void add(int code, Subfield s);
  std::unordered_map<int, Subfield> codes_;
};

/// Thrown when a dossier has no record with a known ASJC code.
class NoSubjectData : public DataError {
 public:
  using DataError::DataError;
};

/// s_d: number of distinct (pub_id, subfield) annotations per subfield.
/// Rows of one publication share its annotations, so a publication listed
/// under several affiliations counts once.
struct SubjectCounts {
  std::array<std::int64_t, kSubfieldCount> counts{};
  std::size_t ignored_codes = 0;  ///< codes missing from the table

  std::int64_t total() const;
};

SubjectCounts subject_counts(const AuthorDossier& dossier, const AsjcTable& table);

/// Share of the researcher's subject annotations per major field.
struct FieldFrequencies {
  std::array<double, kMajorFieldCount> share{};

  double operator[](MajorField m) const { return share[index(m)]; }
};

/// Population mean and standard deviation of f_m over researchers.
struct FieldStats {
  std::array<double, kMajorFieldCount> mean{};
  std::array<double, kMajorFieldCount> stddev{};
};

/// Normalized contribution NC_d per subfield; sums to 1.
struct DisciplineVector {
  std::array<double, kSubfieldCount> nc{};

  double operator[](Subfield s) const { return nc[index(s)]; }
  friend bool operator==(const DisciplineVector&, const DisciplineVector&) = default;
};

/// Throws NoSubjectData.
FieldFrequencies field_frequencies(const AuthorDossier& dossier, const AsjcTable& table);

/// Throws std::invalid_argument on an empty collection.
FieldStats compute_field_stats(std::span<const FieldFrequencies> all);

struct FieldAssignment {
  FieldClass field = FieldClass::kMultidisciplinary;
  std::array<double, kMajorFieldCount> z{};
  double max_z = 0.0;
  bool tie = false;  ///< several fields shared the maximal Z
};

/// Z_m = (f_m - mu_m) / sigma_m, with Z_m = 0 when sigma_m = 0. Returns the
/// field of the largest Z if it exceeds alpha, else multidisciplinary. Ties
/// resolve in the order physical, life, health, social.
FieldAssignment classify_major_field(const FieldFrequencies& f, const FieldStats& stats, double alpha);

/// Smallest alpha (to `resolution`, by bisection over the empirical max-Z
/// distribution) whose multidisciplinary share reaches `target_share`.
/// Throws DataError when the achieved share misses the target by more than
/// one percentage point.
double calibrate_alpha(std::span<const FieldFrequencies> all, const FieldStats& stats, double target_share,
                       double resolution = 1e-3);

/// Share of researchers classified multidisciplinary at `alpha`.
double multidisciplinary_share(std::span<const FieldFrequencies> all, const FieldStats& stats, double alpha);

/// NC_d = s_d / sum_i s_i. Throws NoSubjectData.
DisciplineVector normalized_contribution(const AuthorDossier& dossier, const AsjcTable& table);

/// P_d = sum of NC_d over the given researchers.
double normalized_count(std::span<const DisciplineVector> vectors, Subfield d);

}  // namespace scholmig::taxonomy

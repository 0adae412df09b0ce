#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scholmig/country.hpp"
#include "scholmig/mobility.hpp"
#include "scholmig/records.hpp"
#include "scholmig/taxonomy.hpp"

namespace scholmig::metrics {

/// max(1, snapshot_year - first_year). Throws std::invalid_argument when the
/// snapshot precedes the first publication.
int academic_age(const AuthorDossier& dossier, int snapshot_year);

struct CitationSummary {
  std::int64_t total_citations = 0;  ///< once per distinct pub_id
  int academic_age = 1;
  double annual_rate = 0.0;
  double field_normalized_rate = 0.0;
};

CitationSummary annual_citation_rate(const AuthorDossier& dossier, int snapshot_year);

enum class RateScope { kMigrants, kAll };

struct RatedResearcher {
  std::optional<taxonomy::FieldClass> field;
  mobility::MobilityLabel label = mobility::MobilityLabel::kNonMover;
  double rate = 0.0;
};

using FieldMeans = std::map<taxonomy::FieldClass, double>;

/// Arithmetic mean rate per field over the scope. Fields with no researcher
/// in scope are omitted (and logged).
FieldMeans field_mean_rates(std::span<const RatedResearcher> researchers, RateScope scope);

/// rate / mean of the field; 0 when the field mean is missing or zero.
double field_normalized_rate(double rate, taxonomy::FieldClass field, const FieldMeans& means);

enum class CitationClass { kLow, kModerate, kHigh };

std::string_view to_string(CitationClass c);

class CitationClassBoundaries {
 public:
  /// Throws std::invalid_argument unless t1 <= t2.
  CitationClassBoundaries(double t1, double t2);

  /// Tertile cut points of `rates`: sorted v, t1 = v[floor(n/3)],
  /// t2 = v[ceil(2n/3) - 1]. Throws std::invalid_argument on an empty sample.
  static CitationClassBoundaries fit(std::span<const double> rates);

  double t1() const { return t1_; }
  double t2() const { return t2_; }

 private:
  double t1_;
  double t2_;
};

/// Low below t1, moderate on [t1, t2], high above t2.
CitationClass citation_class(double rate, const CitationClassBoundaries& boundaries);

/// Whether the author is taken to be in `focal` during `year`: the nearest
/// active year p within `padding` of `year` has focal among its modes, and no
/// active year at distance <= |year - p| has a mode set without focal.
bool present_in_year(const mobility::YearCountrySeries& series, Country focal, int year, int padding);

/// M_y over all given authors.
double estimate_population(std::span<const mobility::YearCountrySeries> series, Country focal, int year,
                           int padding = 2);

struct PopulationSeries {
  int padding = 2;
  std::map<int, double> by_year;
};

PopulationSeries estimate_population_series(std::span<const mobility::YearCountrySeries> series, Country focal,
                                            int first_year, int last_year, int padding = 2);

/// Event ending in a mode set with focal, from a country other than focal.
bool is_immigration(const mobility::MigrationEvent& event, Country focal);
/// Event in which focal vanished.
bool is_emigration(const mobility::MigrationEvent& event, Country focal);

/// Distinct migrants per event to_year.
struct MigrationCounts {
  std::map<int, std::int64_t> immigrants;
  std::map<int, std::int64_t> emigrants;
};

MigrationCounts count_migrations(std::span<const mobility::MobilityProfile> profiles, Country focal);

struct NmrPoint {
  int year = 0;
  std::int64_t immigrants = 0;
  std::int64_t emigrants = 0;
  double population = 0.0;
  double in_rate = 0.0;   ///< per 1000
  double out_rate = 0.0;  ///< per 1000
  double nmr = 0.0;       ///< per 1000
};

/// nullopt (with a warning) when the population is zero.
std::optional<NmrPoint> net_migration_rate(int year, std::int64_t immigrants, std::int64_t emigrants,
                                           double population);

/// One point per year in [first_year, last_year] with a positive population.
std::vector<NmrPoint> nmr_series(std::span<const mobility::MobilityProfile> profiles,
                                 std::span<const mobility::YearCountrySeries> series, Country focal, int first_year,
                                 int last_year, int padding = 2);

/// Normalized counts of one discipline per migrant group.
struct FnbdTerms {
  double emigrants = 0.0;
  double transients = 0.0;
  double immigrants = 0.0;
  double returners = 0.0;

  double total() const { return emigrants + transients + immigrants + returners; }
};

struct FnbdResult {
  std::string discipline;
  double p_d = 0.0;
  double p_emi = 0.0;
  double p_tra = 0.0;
  double p_imm = 0.0;
  double p_ret = 0.0;
  std::optional<double> fnbd;  ///< empty when P_d = 0
  bool reliable = false;       ///< P_d >= min_support
};

inline constexpr double kDefaultMinSupport = 30.0;

FnbdResult fnbd(std::string discipline, const FnbdTerms& terms, double min_support = kDefaultMinSupport);

/// FNBD per subfield from migrants' normalized contributions. `vectors` is
/// aligned with `labels`; researchers without a vector or a migrant label are
/// skipped.
std::vector<FnbdResult> fnbd_by_discipline(std::span<const mobility::MobilityLabel> labels,
                                           std::span<const std::optional<taxonomy::DisciplineVector>> vectors,
                                           double min_support = kDefaultMinSupport);

/// e.g. "computer_science: 12.7% net drain".
std::string describe_fnbd(const FnbdResult& result);

struct ClassifiedMigrant {
  mobility::MobilityLabel label;
  Country origin;
  Country destination;
  CitationClass citation_class;
};

/// Class composition of immigrants by origin and of emigrants by destination.
struct ClassComposition {
  Country country;
  std::string direction;  ///< "immigrant" or "emigrant"
  std::array<std::int64_t, 3> counts{};

  friend bool operator==(const ClassComposition&, const ClassComposition&) = default;
};

std::vector<ClassComposition> citation_class_composition(std::span<const ClassifiedMigrant> migrants);

void write_nmr_csv(std::span<const NmrPoint> points, std::ostream& out);
void write_fnbd_csv(std::span<const FnbdResult> results, std::ostream& out);
void write_citation_classes_csv(std::span<const ClassComposition> rows, std::ostream& out);

}  // namespace scholmig::metrics

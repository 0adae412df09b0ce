#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scholmig/country.hpp"
#include "scholmig/records.hpp"
#include "scholmig/taxonomy.hpp"

namespace scholmig::mobility {

/// Country multiset of one publication year and its mode set.
struct YearModes {
  int year = 0;
  std::vector<std::pair<Country, int>> counts;  ///< sorted by country
  std::vector<Country> modes;                   ///< sorted, non-empty

  bool has_mode(Country c) const;
};

/// Active years of one author in ascending order. UNKNOWN-country records
/// are excluded; years with no known country are omitted.
class YearCountrySeries {
 public:
  YearCountrySeries() = default;
  static YearCountrySeries from_dossier(const AuthorDossier& dossier);
  /// Builds a series from explicit mode sets (each country counted once).
  static YearCountrySeries from_modes(const std::vector<std::pair<int, std::vector<Country>>>& modes);

  std::span<const YearModes> years() const { return years_; }
  const YearModes* find(int year) const;
  bool empty() const { return years_.empty(); }
  std::size_t size() const { return years_.size(); }

 private:
  std::vector<YearModes> years_;
};

/// Countries of maximal multiplicity among the dossier's known-country
/// records in `year`; empty when there are none.
std::vector<Country> mode_countries(const AuthorDossier& dossier, int year);

/// A previous mode country disappeared between two consecutive active years.
struct MigrationEvent {
  int from_year = 0;
  int to_year = 0;
  std::vector<Country> from_modes;
  std::vector<Country> to_modes;
  Country vanished;
};

/// One event per country in modes(y1) \ modes(y2) for each pair of
/// consecutive active years. Growing mode sets produce nothing.
std::vector<MigrationEvent> detect_events(const YearCountrySeries& series);

/// A country plus the active year it was read from. An unknown country means
/// UNDETERMINED.
struct CareerAnchor {
  Country country;
  int year = 0;

  bool determined() const { return country.known(); }
};

/// Mode country of the first active year; when that year is tied, the
/// nearest later year with a single mode country.
CareerAnchor academic_origin(const YearCountrySeries& series);
/// Mode country of the latest active year; ties fall back to earlier years.
CareerAnchor academic_destination(const YearCountrySeries& series);

enum class MobilityLabel { kSinglePaper, kNonMover, kImmigrant, kEmigrant, kReturnMigrant, kTransient, kNonFocal };

inline constexpr std::size_t kLabelCount = 7;

std::string_view to_string(MobilityLabel label);
std::optional<MobilityLabel> label_from_string(std::string_view name);
bool is_migrant(MobilityLabel label);

/// Labels an author relative to `focal`:
///  - NonFocal when focal never appears in any year's mode set;
///  - SinglePaper with exactly one distinct publication;
///  - NonMover with no migration event;
///  - otherwise by origin and destination: Immigrant (not focal -> focal),
///    Emigrant (focal -> not focal), ReturnMigrant (focal -> focal), and
///    Transient (neither end focal). UNDETERMINED ends count as not focal.
MobilityLabel classify_mobility(const AuthorDossier& dossier, const YearCountrySeries& series, Country focal);

struct MobilityProfile {
  std::string author_id;
  MobilityLabel label = MobilityLabel::kNonFocal;
  CareerAnchor origin;
  CareerAnchor destination;
  std::vector<MigrationEvent> events;
  int first_year = 0;
  int last_year = 0;
};

struct AuthorMobility {
  YearCountrySeries series;
  MobilityProfile profile;
};

AuthorMobility analyze_mobility(const AuthorDossier& dossier, Country focal);

/// Non-focal mode countries of the active years strictly between a return
/// migrant's origin and destination years, weighted equally to sum to 1.
/// Falls back to every active year when that window holds none.
/// Throws std::invalid_argument for any other label.
std::map<Country, double> intermediate_countries(const MobilityProfile& profile, const YearCountrySeries& series,
                                                 Country focal);

struct FlowEdge {
  Country origin;
  Country destination;
  std::optional<taxonomy::FieldClass> field;
  double weight = 0.0;

  friend bool operator==(const FlowEdge&, const FlowEdge&) = default;
};

struct FlowOptions {
  bool group_by_field = false;
  /// Splits each transient's unit over origin -> focal and focal -> destination.
  bool include_transients = false;
};

/// Movers: one unit per Immigrant, Emigrant and ReturnMigrant on its
/// origin -> destination edge. `fields` (aligned with `profiles`) is required
/// when grouping by field. Edges are sorted by (field, origin, destination).
std::vector<FlowEdge> build_flow_network(std::span<const MobilityProfile> profiles, Country focal,
                                         const FlowOptions& options = {},
                                         std::span<const std::optional<taxonomy::FieldClass>> fields = {});

/// Moves: one unit per migration event of the same authors, from the vanished
/// country to the countries that newly became modes (split equally).
std::vector<FlowEdge> build_move_network(std::span<const MobilityProfile> profiles, Country focal,
                                         const FlowOptions& options = {},
                                         std::span<const std::optional<taxonomy::FieldClass>> fields = {});

/// `origin,destination,major_field,weight`
void write_flows_csv(std::span<const FlowEdge> edges, std::ostream& out);
/// `author_id,label,origin,destination,n_events,first_year,last_year`
void write_profiles_csv(std::span<const MobilityProfile> profiles, std::ostream& out);

struct ProfileRow {
  std::string author_id;
  MobilityLabel label;
  Country origin;
  Country destination;
  std::size_t n_events = 0;
  int first_year = 0;
  int last_year = 0;
};
std::vector<ProfileRow> read_profiles_csv(std::istream& in);

}  // namespace scholmig::mobility

#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "scholmig/country.hpp"
#include "scholmig/geoinfer.hpp"
#include "scholmig/mobility.hpp"
#include "scholmig/records.hpp"

namespace scholmig::testing {

inline Country cc(std::string_view code) { return Country::from_code(code); }

inline AuthorshipRecord rec(std::string author, std::string pub, int year, std::string_view country,
                            std::vector<int> codes = {}, std::int64_t cites = 0, std::string affiliation = {}) {
  AuthorshipRecord r;
  r.author_id = std::move(author);
  r.pub_id = std::move(pub);
  r.year = year;
  r.country = country.empty() ? Country{} : Country::from_code(country);
  r.asjc_codes = std::move(codes);
  r.citation_count = cites;
  r.affiliation_text = std::move(affiliation);
  return r;
}

inline Corpus corpus_of(std::vector<AuthorshipRecord> records, int snapshot_year = 2020) {
  Corpus c;
  c.records = std::move(records);
  c.snapshot_year = snapshot_year;
  return c;
}

/// Single dossier built through group_by_author.
inline AuthorDossier dossier_of(std::vector<AuthorshipRecord> records) {
  auto dossiers = group_by_author(corpus_of(std::move(records)));
  return dossiers.at(0);
}

// ASJC codes used by the worked example.
inline constexpr int kMaths = 2604;
inline constexpr int kChemistry = 1605;
inline constexpr int kEnergy = 2102;

/// Author x from the fictitious example, one row per (affiliation, country).
inline std::vector<AuthorshipRecord> worked_example_records() {
  return {
      rec("x", "111", 2012, "RU", {kMaths}, 0, "Moscow State University"),
      rec("x", "222", 2013, "RU", {kChemistry, kEnergy}, 0, "Moscow State University"),
      rec("x", "222", 2013, "US", {kChemistry, kEnergy}, 0, "Stanford University"),
      rec("x", "333", 2015, "US", {kMaths, kChemistry}, 0, "Stanford University"),
  };
}

inline std::string worked_example_csv() {
  return "author_id,pub_id,year,affiliation_text,country,asjc_codes,citation_count\n"
         "x,111,2012,Moscow State University,RU,2604,0\n"
         "x,222,2013,Moscow State University,RU,1605;2102,0\n"
         "x,222,2013,Stanford University,US,1605;2102,0\n"
         "x,333,2015,Stanford University,US,2604;1605,0\n";
}

/// Series from per-year country lists (each a mode).
inline mobility::YearCountrySeries series_of(std::initializer_list<std::pair<int, std::vector<std::string>>> years) {
  std::vector<std::pair<int, std::vector<Country>>> modes;
  for (const auto& [year, codes] : years) {
    std::vector<Country> cs;
    for (const auto& c : codes) cs.push_back(Country::from_code(c));
    modes.emplace_back(year, std::move(cs));
  }
  return mobility::YearCountrySeries::from_modes(modes);
}

inline std::filesystem::path data_dir() { return SCHOLMIG_DATA_DIR; }

inline const geoinfer::Gazetteer& shipped_gazetteer() {
  static const auto g = geoinfer::Gazetteer::load(data_dir() / "gazetteer.csv");
  return g;
}

/// Fresh scratch directory under the build tree, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("scholmig_test_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace scholmig::testing

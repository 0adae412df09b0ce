#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace scholmig::cli {

class StageOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stage prerequisites. A stage may run once all of them are recorded.
const std::vector<std::string>& prerequisites(const std::string& stage);

/// `manifest.json` in the output directory: version, config hash, and the
/// row counts of every completed stage. Holds no timestamps.
class Manifest {
 public:
  static Manifest load(const std::filesystem::path& output_dir);
  void save() const;

  bool has(const std::string& stage) const { return stages_.contains(stage); }
  /// Throws StageOrderError naming the first missing prerequisite.
  void require(const std::string& stage) const;
  /// Records `stage` and drops every stage that depends on it.
  void complete(const std::string& stage, const std::map<std::string, std::size_t>& output_rows,
                const std::string& config_hash);

  const nlohmann::json& stage(const std::string& name) const { return stages_.at(name); }

 private:
  std::filesystem::path path_;
  nlohmann::json stages_ = nlohmann::json::object();
  std::string config_hash_;
};

}  // namespace scholmig::cli

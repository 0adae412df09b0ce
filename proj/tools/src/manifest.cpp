#include "manifest.hpp"

#include <fstream>
#include <set>

#include "scholmig/error.hpp"

namespace scholmig::cli {

namespace {

const std::map<std::string, std::vector<std::string>>& graph() {
  static const std::map<std::string, std::vector<std::string>> g{
      {"ingest", {}},
      {"fill-countries", {"ingest"}},
      {"disambiguate", {"fill-countries"}},
      {"classify-fields", {"disambiguate"}},
      {"classify-mobility", {"disambiguate"}},
      {"metrics-nmr", {"classify-mobility"}},
      {"metrics-fnbd", {"classify-fields", "classify-mobility"}},
      {"metrics-citations", {"classify-fields", "classify-mobility"}},
      {"metrics-flows", {"classify-fields", "classify-mobility"}},
      {"sensitivity-nmr", {"classify-mobility"}},
      {"sensitivity-padding", {"classify-mobility"}},
      {"sensitivity-fnbd", {"classify-fields", "classify-mobility"}},
      {"synth-generate", {}},
      {"synth-score", {"synth-generate", "classify-mobility"}},
  };
  return g;
}

}  // namespace

const std::vector<std::string>& prerequisites(const std::string& stage) { return graph().at(stage); }

Manifest Manifest::load(const std::filesystem::path& output_dir) {
  Manifest m;
  m.path_ = output_dir / "manifest.json";
  std::ifstream in(m.path_);
  if (!in) return m;
  try {
    const auto j = nlohmann::json::parse(in);
    m.stages_ = j.at("stages");
    m.config_hash_ = j.at("config_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("unreadable manifest " + m.path_.string() + ": " + e.what());
  }
  return m;
}

void Manifest::save() const {
  nlohmann::json j;
  j["version"] = SCHOLMIG_VERSION;
  j["config_hash"] = config_hash_;
  j["stages"] = stages_;
  std::ofstream out(path_);
  if (!out) throw IoError("cannot write " + path_.string());
  out << j.dump(2) << '\n';
}

void Manifest::require(const std::string& stage) const {
  for (const auto& pre : prerequisites(stage)) {
    if (!has(pre)) throw StageOrderError(stage + " needs the outputs of " + pre + "; run it first");
  }
}

void Manifest::complete(const std::string& stage, const std::map<std::string, std::size_t>& output_rows,
                        const std::string& config_hash) {
  std::set<std::string> stale{stage};
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& [name, pres] : graph()) {
      if (stale.contains(name)) continue;
      for (const auto& p : pres) {
        if (stale.contains(p)) {
          stale.insert(name);
          grew = true;
          break;
        }
      }
    }
  }
  for (const auto& s : stale) stages_.erase(s);
  nlohmann::json rows = nlohmann::json::object();
  for (const auto& [file, n] : output_rows) rows[file] = n;
  stages_[stage] = {{"config_hash", config_hash}, {"rows", rows}};
  config_hash_ = config_hash;
}

}  // namespace scholmig::cli

#include <doctest.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"

using namespace scholmig;
using namespace scholmig::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string gazetteer() { return (data_dir() / "gazetteer.csv").string(); }

// Generated corpus shared by the cases below.
const fs::path& generated_dir() {
  static const ScratchDir dir("cli_generated");
  static const bool ready = [] {
    const auto r = invoke({"synth", "generate", "--output-dir", dir.path().string(), "--gazetteer", gazetteer(),
                        "--synth-authors", "600", "--seed", "5", "--merged-id-fraction", "0.01",
                        "--missing-country-fraction", "0.05", "--tie-year-fraction", "0.3"});
    REQUIRE(r.code == 0);
    return true;
  }();
  (void)ready;
  return dir.path();
}

std::vector<std::string> run_args(const fs::path& out) {
  return {"run", "--output-dir", out.string(), "--corpus", (generated_dir() / "synth_corpus.csv").string(),
          "--gazetteer", gazetteer()};
}

}  // namespace

TEST_SUITE("integration") {
  TEST_CASE("generate, run and score") {
    const ScratchDir out("cli_run");
    const auto dir = out.path().string();
    REQUIRE(invoke({"synth", "generate", "--output-dir", dir, "--gazetteer", gazetteer(), "--synth-authors", "600",
                    "--seed", "6", "--merged-id-fraction", "0.01", "--missing-country-fraction", "0.05"})
                .code == 0);
    const auto run = invoke({"run", "--output-dir", dir, "--corpus", (out.path() / "synth_corpus.csv").string(),
                             "--gazetteer", gazetteer()});
    REQUIRE_MESSAGE(run.code == 0, run.err);
    for (const char* name : {"corpus.csv", "corpus_filled.csv", "corpus_disambiguated.csv", "revised_ids.csv",
                             "fields.csv", "profiles.csv", "nmr.csv", "fnbd.csv", "citation_classes.csv",
                             "flows.csv", "flows_moves.csv", "manifest.json"}) {
      CHECK_MESSAGE(fs::is_regular_file(out.path() / name), name);
    }
    const auto score = invoke({"synth", "score", "--output-dir", dir});
    REQUIRE_MESSAGE(score.code == 0, score.err);
    const auto j = nlohmann::json::parse(slurp(out.path() / "synth_score.json"));
    CHECK(j.at("label_accuracy").get<double>() >= 0.95);
    CHECK(j.at("fill_accuracy").get<double>() >= 0.95);
    CHECK(j.at("cross_original_merges").get<int>() == 0);
  }

  TEST_CASE("reruns are byte-identical") {
    const ScratchDir a("cli_rerun_a");
    const ScratchDir b("cli_rerun_b");
    REQUIRE(invoke(run_args(a.path())).code == 0);
    REQUIRE(invoke(run_args(b.path())).code == 0);
    for (const char* name : {"corpus_disambiguated.csv", "revised_ids.csv", "profiles.csv", "nmr.csv", "fnbd.csv",
                             "flows.csv", "citation_classes.csv"}) {
      CHECK_MESSAGE(slurp(a.path() / name) == slurp(b.path() / name), name);
    }
  }

  TEST_CASE("metrics before mobility is a stage-order error") {
    const ScratchDir out("cli_order");
    REQUIRE(invoke({"ingest", "--output-dir", out.path().string(), "--corpus",
                 (generated_dir() / "synth_corpus.csv").string()})
                .code == 0);
    const auto r = invoke({"metrics", "fnbd", "--output-dir", out.path().string()});
    CHECK(r.code == cli::kStageOrderError);
    CHECK(r.err.find("metrics") != std::string::npos);
  }

  TEST_CASE("missing gazetteer is a config error naming geoinfer") {
    const ScratchDir out("cli_gazetteer");
    REQUIRE(invoke({"ingest", "--output-dir", out.path().string(), "--corpus",
                 (generated_dir() / "synth_corpus.csv").string()})
                .code == 0);
    const auto r = invoke({"fill-countries", "--output-dir", out.path().string(), "--gazetteer",
                        (out.path() / "absent.csv").string()});
    CHECK(r.code == cli::kConfigError);
    CHECK(r.err.find("geoinfer") != std::string::npos);
  }

  TEST_CASE("malformed corpus is a data error") {
    const ScratchDir out("cli_bad");
    {
      std::ofstream bad(out.path() / "bad.csv");
      bad << "not,a,corpus\n1,2,3\n";
    }
    const auto r = invoke({"ingest", "--output-dir", out.path().string(), "--corpus", (out.path() / "bad.csv").string()});
    CHECK(r.code == cli::kDataError);
  }

  TEST_CASE("unknown option is a config error") {
    CHECK(invoke({"run", "--output-dir", "x", "--no-such-flag"}).code == cli::kConfigError);
    CHECK(invoke({"--version"}).code == 0);
  }

  TEST_CASE("padding sweep writes one series per padding") {
    const ScratchDir out("cli_padding");
    REQUIRE(invoke(run_args(out.path())).code == 0);
    const auto r = invoke({"sensitivity", "padding", "--output-dir", out.path().string(), "--paddings", "1,2,3,4,5"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    std::istringstream in(slurp(out.path() / "sensitivity_padding.csv"));
    std::string line;
    std::getline(in, line);
    std::set<std::string> paddings;
    while (std::getline(in, line)) paddings.insert(line.substr(0, line.find(',')));
    CHECK(paddings == std::set<std::string>{"1", "2", "3", "4", "5"});
  }
}

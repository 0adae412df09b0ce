#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "manifest.hpp"
#include "scholmig/analysis.hpp"
#include "scholmig/csv.hpp"
#include "scholmig/disambig.hpp"
#include "scholmig/error.hpp"
#include "scholmig/geoinfer.hpp"
#include "scholmig/metrics.hpp"
#include "scholmig/mobility.hpp"
#include "scholmig/records.hpp"
#include "scholmig/sensitivity.hpp"
#include "scholmig/synth.hpp"
#include "scholmig/taxonomy.hpp"
#include "scholmig/text.hpp"

namespace scholmig::cli {

namespace fs = std::filesystem;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string output_dir;
  std::string corpus;
  std::string gazetteer;
  std::string asjc_map;
  std::string truth;
  std::string focal_country = "RU";
  int snapshot_year = 2020;
  double max_malformed_fraction = 0.5;

  int max_countries = 6;
  int max_publications = 292;
  double w_affiliation = 0.4;
  double w_country = 0.2;
  double w_subject = 0.3;
  double w_year = 0.1;
  double cut_threshold = 0.5;

  double alpha = 1.0;
  std::optional<double> target_share;
  int padding = 2;
  double min_support = metrics::kDefaultMinSupport;
  std::optional<int> first_year;
  std::optional<int> last_year;
  bool group_by_field = false;
  bool include_transients = false;

  std::uint64_t seed = 1;
  std::vector<double> proportions;
  int runs = 10;
  std::vector<int> paddings{1, 2, 3, 4, 5};

  int synth_authors = 10000;
  double merged_id_fraction = 0.0;
  double missing_country_fraction = 0.0;
  double tie_year_fraction = 0.0;
  std::optional<int> emigrant_departure_year;

  std::string log_level = "warn";
};

/// Canonical text of every setting that shapes outputs.
std::string config_hash(const Options& o) {
  std::ostringstream s;
  auto opt = [](const auto& v) { return v ? fmt::format("{}", *v) : std::string("-"); };
  s << "corpus=" << o.corpus << "\ngazetteer=" << o.gazetteer << "\nasjc_map=" << o.asjc_map
    << "\nfocal=" << o.focal_country << "\nsnapshot=" << o.snapshot_year
    << "\nmax_malformed=" << format_number(o.max_malformed_fraction) << "\nmax_countries=" << o.max_countries
    << "\nmax_publications=" << o.max_publications << "\nweights=" << format_number(o.w_affiliation) << ','
    << format_number(o.w_country) << ',' << format_number(o.w_subject) << ',' << format_number(o.w_year)
    << "\ncut=" << format_number(o.cut_threshold) << "\nalpha=" << format_number(o.alpha)
    << "\ntarget=" << opt(o.target_share) << "\npadding=" << o.padding
    << "\nmin_support=" << format_number(o.min_support) << "\nwindow=" << opt(o.first_year) << ','
    << opt(o.last_year) << "\ngroup_by_field=" << o.group_by_field << "\ntransients=" << o.include_transients
    << "\nseed=" << o.seed << "\nruns=" << o.runs << "\nproportions=" << fmt::format("{}", fmt::join(o.proportions, ","))
    << "\npaddings=" << fmt::format("{}", fmt::join(o.paddings, ",")) << "\nsynth_authors=" << o.synth_authors
    << "\nmerged=" << format_number(o.merged_id_fraction) << "\nmissing=" << format_number(o.missing_country_fraction)
    << "\nties=" << format_number(o.tie_year_fraction) << "\ndeparture=" << opt(o.emigrant_departure_year);
  return to_hex(fnv1a64(s.str()));
}

const char* module_of(const std::string& stage) {
  if (stage == "ingest") return "records";
  if (stage == "fill-countries") return "geoinfer";
  if (stage == "disambiguate") return "disambig";
  if (stage == "classify-fields") return "taxonomy";
  if (stage == "classify-mobility") return "mobility";
  if (stage.starts_with("metrics")) return "metrics";
  if (stage.starts_with("sensitivity")) return "sensitivity";
  return "synth";
}

using RowCounts = std::map<std::string, std::size_t>;

class Pipeline {
 public:
  Pipeline(const Options& o, std::ostream& out) : o_(o), out_(out), dir_(o.output_dir), hash_(config_hash(o)) {}

  /// Runs one stage under the manifest's ordering rules.
  void stage(const std::string& name, const std::function<RowCounts()>& body) {
    current_ = name;
    auto manifest = Manifest::load(dir_);
    manifest.require(name);
    const auto rows = body();
    manifest.complete(name, rows, hash_);
    manifest.save();
    spdlog::info("{} done", name);
  }

  const std::string& current() const { return current_; }

  RowCounts ingest() {
    if (o_.corpus.empty()) throw ConfigError("no input corpus; pass --corpus");
    require_file(o_.corpus, "corpus");
    ParseOptions po;
    po.snapshot_year = o_.snapshot_year;
    po.max_malformed_fraction = o_.max_malformed_fraction;
    auto parsed = parse_corpus(o_.corpus, po);
    write("corpus.csv", [&](std::ostream& s) { write_corpus_csv(parsed.corpus, s); });
    write("ingest_errors.csv", [&](std::ostream& s) { write_row_errors_csv(parsed.report.errors, s); });
    out_ << fmt::format("ingest: {} records, {} rejected rows, {} duplicates removed\n",
                        parsed.corpus.records.size(), parsed.report.errors.size(),
                        parsed.report.duplicates_removed);
    return {{"corpus.csv", parsed.corpus.records.size()}, {"ingest_errors.csv", parsed.report.errors.size()}};
  }

  RowCounts fill_countries() {
    const auto gazetteer = load_gazetteer();
    const auto corpus = read_corpus("corpus.csv");
    const geoinfer::GazetteerInferrer inferrer(gazetteer);
    const auto [filled, report] = geoinfer::fill_missing_countries(corpus, inferrer);
    write("corpus_filled.csv", [&](std::ostream& s) { write_corpus_csv(filled, s); });
    const nlohmann::json j{
        {"unknown_before", report.unknown_before}, {"filled", report.filled}, {"unfilled", report.unfilled}};
    write("fill_report.json", [&](std::ostream& s) { s << j.dump(2) << '\n'; });
    out_ << fmt::format("fill-countries: {} of {} unknown countries filled\n", report.filled, report.unknown_before);
    return {{"corpus_filled.csv", filled.records.size()}};
  }

  RowCounts disambiguate() {
    const auto corpus = read_corpus("corpus_filled.csv");
    disambig::DisambigOptions d;
    d.criteria = {o_.max_countries, o_.max_publications};
    d.weights = {o_.w_affiliation, o_.w_country, o_.w_subject, o_.w_year};
    d.cut_threshold = o_.cut_threshold;
    d.criteria.validate();
    d.weights.validate();
    if (!(d.cut_threshold > 0.0 && d.cut_threshold < 1.0)) throw ConfigError("cut-threshold must lie in (0, 1)");
    const auto result = disambig::disambiguate_corpus(corpus, d);
    write("corpus_disambiguated.csv", [&](std::ostream& s) { write_corpus_csv(result.corpus, s); });
    write("revised_ids.csv", [&](std::ostream& s) { disambig::write_revised_id_map(result.id_map, s); });
    write("disambig-report.json", [&](std::ostream& s) { s << disambig::to_json(result.report).dump(2) << '\n'; });
    out_ << fmt::format("disambiguate: {} suspicious IDs, {} clusters\n", result.report.suspicious_ids,
                        result.report.clusters_produced);
    return {{"corpus_disambiguated.csv", result.corpus.records.size()}, {"revised_ids.csv", result.id_map.size()}};
  }

  RowCounts classify_fields() {
    const auto corpus = read_corpus("corpus_disambiguated.csv");
    const auto dossiers = group_by_author(corpus);
    const auto table = load_asjc();
    const auto fields = classify_fields_of(dossiers, table, o_.alpha, o_.target_share);
    write("fields.csv", [&](std::ostream& s) {
      CsvWriter w(s);
      w.row("author_id", "field", "f_life", "f_social", "f_physical", "f_health", "max_z");
      for (std::size_t i = 0; i < dossiers.size(); ++i) {
        const auto& f = fields.frequencies[i];
        const auto& a = fields.assignments[i];
        auto share = [&](taxonomy::MajorField m) { return f ? format_number((*f)[m]) : std::string(); };
        w.row(dossiers[i].author_id, a ? taxonomy::to_string(a->field) : std::string_view(),
              share(taxonomy::MajorField::kLife), share(taxonomy::MajorField::kSocial),
              share(taxonomy::MajorField::kPhysical), share(taxonomy::MajorField::kHealth),
              a ? format_number(a->max_z) : std::string());
      }
    });
    nlohmann::json j;
    j["alpha"] = fields.alpha;
    j["researchers"] = dossiers.size();
    j["without_subjects"] = fields.without_subjects;
    if (fields.stats) {
      for (std::size_t m = 0; m < taxonomy::kMajorFieldCount; ++m) {
        const auto name = std::string(taxonomy::to_string(taxonomy::major_field_at(m)));
        j["mean"][name] = fields.stats->mean[m];
        j["stddev"][name] = fields.stats->stddev[m];
      }
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& a : fields.assignments) {
      if (a) ++counts[std::string(taxonomy::to_string(a->field))];
    }
    j["counts"] = counts;
    write("field_stats.json", [&](std::ostream& s) { s << j.dump(2) << '\n'; });
    out_ << fmt::format("classify-fields: alpha {}, {} researchers\n", format_number(fields.alpha), dossiers.size());
    return {{"fields.csv", dossiers.size()}};
  }

  RowCounts classify_mobility() {
    const auto corpus = read_corpus("corpus_disambiguated.csv");
    const auto dossiers = group_by_author(corpus);
    const auto mobility = classify_all_mobility(dossiers, focal());
    std::vector<mobility::MobilityProfile> profiles;
    std::array<std::size_t, mobility::kLabelCount> counts{};
    for (const auto& m : mobility) {
      profiles.push_back(m.profile);
      ++counts[static_cast<std::size_t>(m.profile.label)];
    }
    write("profiles.csv", [&](std::ostream& s) { mobility::write_profiles_csv(profiles, s); });
    out_ << "classify-mobility:";
    for (std::size_t l = 0; l < counts.size(); ++l) {
      out_ << fmt::format(" {}={}", mobility::to_string(static_cast<mobility::MobilityLabel>(l)), counts[l]);
    }
    out_ << '\n';
    return {{"profiles.csv", profiles.size()}};
  }

  RowCounts metrics_nmr() {
    const auto r = analysis();
    write("nmr.csv", [&](std::ostream& s) { metrics::write_nmr_csv(r.nmr, s); });
    return {{"nmr.csv", r.nmr.size()}};
  }

  RowCounts metrics_fnbd() {
    const auto r = analysis();
    write("fnbd.csv", [&](std::ostream& s) { metrics::write_fnbd_csv(r.fnbd, s); });
    write("fnbd_report.txt", [&](std::ostream& s) {
      for (const auto& f : r.fnbd) s << metrics::describe_fnbd(f) << '\n';
    });
    return {{"fnbd.csv", r.fnbd.size()}};
  }

  RowCounts metrics_citations() {
    const auto r = analysis();
    write("citation_classes.csv",
          [&](std::ostream& s) { metrics::write_citation_classes_csv(r.class_composition, s); });
    nlohmann::json j;
    if (r.boundaries) j["boundaries"] = {{"t1", r.boundaries->t1()}, {"t2", r.boundaries->t2()}};
    for (const auto& [f, m] : r.migrant_means) j["migrant_means"][std::string(taxonomy::to_string(f))] = m;
    for (const auto& [f, m] : r.all_means) j["all_means"][std::string(taxonomy::to_string(f))] = m;
    write("citation_summary.json", [&](std::ostream& s) { s << j.dump(2) << '\n'; });
    return {{"citation_classes.csv", r.class_composition.size()}};
  }

  RowCounts metrics_flows() {
    const auto r = analysis();
    write("flows.csv", [&](std::ostream& s) { mobility::write_flows_csv(r.flows, s); });
    write("flows_moves.csv", [&](std::ostream& s) { mobility::write_flows_csv(r.moves, s); });
    return {{"flows.csv", r.flows.size()}, {"flows_moves.csv", r.moves.size()}};
  }

  RowCounts sensitivity_nmr() {
    const auto corpus = read_corpus("corpus_disambiguated.csv");
    const auto study = sensitivity::nmr_exclusion_study(corpus, analysis_config(), plan(true));
    write("sensitivity_nmr.csv", [&](std::ostream& s) { sensitivity::write_nmr_study_csv(study, s); });
    write("sensitivity_nmr_summary.csv", [&](std::ostream& s) {
      CsvWriter w(s);
      w.row("proportion", "mean", "median", "q1", "q3");
      for (const auto& v : study.variance) {
        w.row(format_number(v.proportion), format_number(v.mean), format_number(v.median), format_number(v.q1),
              format_number(v.q3));
      }
    });
    return {{"sensitivity_nmr.csv", study.runs.size()}};
  }

  RowCounts sensitivity_fnbd() {
    const auto corpus = read_corpus("corpus_disambiguated.csv");
    const auto study = sensitivity::fnbd_exclusion_study(corpus, load_asjc(), analysis_config(), plan(false));
    write("sensitivity_fnbd.csv", [&](std::ostream& s) { sensitivity::write_fnbd_study_csv(study, s); });
    write("sensitivity_fnbd_stability.csv", [&](std::ostream& s) {
      CsvWriter w(s);
      w.row("discipline", "base", "positive", "negative", "undefined", "unstable");
      for (const auto& st : study.stability) {
        w.row(st.discipline, st.base ? format_number(*st.base) : std::string(), std::to_string(st.positive),
              std::to_string(st.negative), std::to_string(st.undefined), st.unstable ? "true" : "false");
      }
    });
    return {{"sensitivity_fnbd.csv", study.runs.size()}};
  }

  RowCounts sensitivity_padding() {
    const auto corpus = read_corpus("corpus_disambiguated.csv");
    const auto sweep = sensitivity::padding_sweep(corpus, analysis_config(), o_.paddings);
    write("sensitivity_padding.csv", [&](std::ostream& s) { sensitivity::write_padding_sweep_csv(sweep, s); });
    out_ << fmt::format("sensitivity padding: {} series, sign pattern {}\n", sweep.series.size(),
                        sweep.sign_pattern_preserved ? "preserved" : "changed");
    return {{"sensitivity_padding.csv", sweep.paddings.size()}};
  }

  RowCounts synth_generate() {
    const auto gazetteer = load_gazetteer();
    auto cfg = synth::GeneratorConfig::with_population(o_.synth_authors, o_.seed);
    cfg.focal = focal();
    cfg.snapshot_year = o_.snapshot_year;
    cfg.merged_id_fraction = o_.merged_id_fraction;
    cfg.missing_country_fraction = o_.missing_country_fraction;
    cfg.tie_year_fraction = o_.tie_year_fraction;
    cfg.emigrant_departure_year = o_.emigrant_departure_year;
    std::erase_if(cfg.partners, [&](const synth::PartnerCountry& p) { return p.country == cfg.focal; });
    const auto generated = synth::generate_corpus(cfg, gazetteer);
    write("synth_corpus.csv", [&](std::ostream& s) { write_corpus_csv(generated.corpus, s); });
    write("truth.jsonl", [&](std::ostream& s) { synth::write_truth_jsonl(generated.truth, s); });
    out_ << fmt::format("synth generate: {} records, {} author IDs\n", generated.corpus.records.size(),
                        generated.truth.authors.size());
    return {{"synth_corpus.csv", generated.corpus.records.size()}, {"truth.jsonl", generated.truth.authors.size()}};
  }

  RowCounts synth_score() {
    const fs::path truth_path = o_.truth.empty() ? dir_ / "truth.jsonl" : fs::path(o_.truth);
    require_file(truth_path, "truth");
    std::ifstream tin(truth_path);
    const auto truth = synth::read_truth_jsonl(tin);
    const auto input = read_corpus("corpus.csv");
    const auto repaired = read_corpus("corpus_disambiguated.csv");
    std::ifstream pin(dir_ / "profiles.csv");
    std::vector<mobility::MobilityProfile> profiles;
    for (const auto& row : mobility::read_profiles_csv(pin)) {
      mobility::MobilityProfile p;
      p.author_id = row.author_id;
      p.label = row.label;
      p.origin.country = row.origin;
      p.destination.country = row.destination;
      p.first_year = row.first_year;
      p.last_year = row.last_year;
      profiles.push_back(std::move(p));
    }
    const auto score = synth::score_against_truth(input, repaired, profiles, truth);
    const auto j = synth::to_json(score);
    write("synth_score.json", [&](std::ostream& s) { s << j.dump(2) << '\n'; });
    out_ << j.dump(2) << '\n';
    return {{"synth_score.json", 1}};
  }

 private:
  static void require_file(const fs::path& path, const char* what) {
    if (!fs::is_regular_file(path)) throw ConfigError(fmt::format("{} file not found: {}", what, path.string()));
  }

  template <typename Body>
  void write(const std::string& name, Body&& body) const {
    const auto path = dir_ / name;
    std::ofstream s(path, std::ios::binary);
    if (!s) throw IoError("cannot write " + path.string());
    body(s);
    if (!s) throw IoError("write failed for " + path.string());
  }

  Corpus read_corpus(const std::string& name) const {
    ParseOptions po;
    po.snapshot_year = o_.snapshot_year;
    po.max_malformed_fraction = o_.max_malformed_fraction;
    return parse_corpus(dir_ / name, po).corpus;
  }

  geoinfer::Gazetteer load_gazetteer() const {
    if (o_.gazetteer.empty()) throw ConfigError("no gazetteer; pass --gazetteer");
    require_file(o_.gazetteer, "gazetteer");
    return geoinfer::Gazetteer::load(o_.gazetteer);
  }

  taxonomy::AsjcTable load_asjc() const {
    if (o_.asjc_map.empty()) return taxonomy::AsjcTable::standard();
    require_file(o_.asjc_map, "ASJC map");
    return taxonomy::AsjcTable::load(o_.asjc_map);
  }

  Country focal() const {
    const auto c = Country::parse(o_.focal_country);
    if (!c || !c->known()) throw ConfigError("focal-country must be a two-letter ISO code");
    return *c;
  }

  static FieldClassification classify_fields_of(std::span<const AuthorDossier> dossiers,
                                                const taxonomy::AsjcTable& table, double alpha,
                                                std::optional<double> target) {
    return scholmig::classify_fields(dossiers, table, alpha, target);
  }

  AnalysisConfig analysis_config() const {
    AnalysisConfig c;
    c.focal = focal();
    c.snapshot_year = o_.snapshot_year;
    c.alpha = o_.alpha;
    c.padding = o_.padding;
    c.min_support = o_.min_support;
    c.flows = {o_.group_by_field, o_.include_transients};
    if (o_.padding < 0) throw ConfigError("padding must be non-negative");
    if (o_.first_year.has_value() != o_.last_year.has_value()) {
      throw ConfigError("first-year and last-year must be given together");
    }
    if (o_.first_year) c.window = YearWindow{*o_.first_year, *o_.last_year};
    // Reuse the alpha chosen by classify-fields so every metric sees the same fields.
    std::ifstream in(dir_ / "field_stats.json");
    if (in) {
      try {
        c.alpha = nlohmann::json::parse(in).at("alpha").get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("unreadable field_stats.json: ") + e.what());
      }
    }
    return c;
  }

  AnalysisResult analysis() const {
    return analyze_corpus(read_corpus("corpus_disambiguated.csv"), load_asjc(), analysis_config());
  }

  sensitivity::ExclusionPlan plan(bool tenths) const {
    auto p = tenths ? sensitivity::ExclusionPlan::tenths(o_.runs, o_.seed)
                    : sensitivity::ExclusionPlan::fifths(o_.runs, o_.seed);
    if (!o_.proportions.empty()) p.proportions = o_.proportions;
    p.validate();
    return p;
  }

  const Options& o_;
  std::ostream& out_;
  fs::path dir_;
  std::string hash_;
  std::string current_;
};

/// TOML reader that accepts snake_case keys for dashed options.
class SnakeCaseConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    auto items = CLI::ConfigTOML::from_config(in);
    for (auto& item : items) std::replace(item.name.begin(), item.name.end(), '_', '-');
    return items;
  }
};

void add_options(CLI::App& app, Options& o) {
  app.set_config("--config", "", "TOML file of option values; flags override it");
  app.config_formatter(std::make_shared<SnakeCaseConfig>());
  app.add_option("--output-dir", o.output_dir, "Directory for all stage outputs")->required();
  app.add_option("--corpus", o.corpus, "Input corpus (CSV or JSON lines)");
  app.add_option("--gazetteer", o.gazetteer, "Gazetteer CSV for country inference");
  app.add_option("--asjc-map", o.asjc_map, "ASJC code table CSV (default: built-in)");
  app.add_option("--truth", o.truth, "Ground-truth JSON lines (default: <output-dir>/truth.jsonl)");
  app.add_option("--focal-country", o.focal_country, "ISO code of the focal country")->capture_default_str();
  app.add_option("--snapshot-year", o.snapshot_year, "Year of the citation snapshot")->capture_default_str();
  app.add_option("--max-malformed-fraction", o.max_malformed_fraction)->capture_default_str()->check(
      CLI::Range(0.0, 1.0));
  app.add_option("--max-countries", o.max_countries, "Suspicion limit on distinct countries")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-publications", o.max_publications, "Suspicion limit on publications")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--w-affiliation", o.w_affiliation)->capture_default_str();
  app.add_option("--w-country", o.w_country)->capture_default_str();
  app.add_option("--w-subject", o.w_subject)->capture_default_str();
  app.add_option("--w-year", o.w_year)->capture_default_str();
  app.add_option("--cut-threshold", o.cut_threshold, "Clustering cut distance")->capture_default_str();
  app.add_option("--alpha", o.alpha, "Z-score threshold for major fields")->capture_default_str();
  app.add_option("--target-multidisciplinary-share", o.target_share, "Calibrate alpha to this share instead")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--padding", o.padding, "Years of presumed presence around a publication")->capture_default_str();
  app.add_option("--min-support", o.min_support, "Smallest reliable P_d for FNBD")->capture_default_str();
  app.add_option("--first-year", o.first_year, "First NMR year");
  app.add_option("--last-year", o.last_year, "Last NMR year");
  app.add_flag("--group-by-field", o.group_by_field, "Split flow edges by major field");
  app.add_flag("--include-transients", o.include_transients, "Count transients in flow edges");
  app.add_option("--seed", o.seed, "Seed for exclusion runs and generation")->capture_default_str();
  app.add_option("--proportions", o.proportions, "Exclusion proportions")->delimiter(',');
  app.add_option("--runs", o.runs, "Runs per exclusion proportion")->capture_default_str()->check(
      CLI::PositiveNumber);
  app.add_option("--paddings", o.paddings, "Paddings for the sweep")->delimiter(',')->capture_default_str();
  app.add_option("--synth-authors", o.synth_authors, "Researchers to generate")->capture_default_str()->check(
      CLI::NonNegativeNumber);
  app.add_option("--merged-id-fraction", o.merged_id_fraction)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  app.add_option("--missing-country-fraction", o.missing_country_fraction)->capture_default_str()->check(
      CLI::Range(0.0, 1.0));
  app.add_option("--tie-year-fraction", o.tie_year_fraction)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  app.add_option("--emigrant-departure-year", o.emigrant_departure_year);
  app.add_option("--log-level", o.log_level, "trace, debug, info, warn, error or off")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scholarly migration measurement from authorship records", "scholmig"};
  app.set_version_flag("--version", SCHOLMIG_VERSION);
  app.require_subcommand(1);
  Options o;
  add_options(app, o);

  std::vector<std::string> stages;
  auto leaf = [&](CLI::App& parent, const std::string& name, const std::string& help, std::vector<std::string> run) {
    auto* sub = parent.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&stages, run] { stages = run; });
    return sub;
  };
  app.fallthrough();
  leaf(app, "ingest", "Parse and validate the input corpus", {"ingest"});
  leaf(app, "fill-countries", "Infer missing countries from affiliation text", {"fill-countries"});
  leaf(app, "disambiguate", "Split suspicious author IDs", {"disambiguate"});
  leaf(app, "classify-fields", "Assign major fields", {"classify-fields"});
  leaf(app, "classify-mobility", "Label mobility types", {"classify-mobility"});
  auto* m = app.add_subcommand("metrics", "Compute metric tables")->require_subcommand(1);
  m->fallthrough();
  leaf(*m, "nmr", "Net migration rates", {"metrics-nmr"});
  leaf(*m, "fnbd", "Field-based net brain drain", {"metrics-fnbd"});
  leaf(*m, "citations", "Citation classes", {"metrics-citations"});
  leaf(*m, "flows", "Flow networks", {"metrics-flows"});
  auto* s = app.add_subcommand("sensitivity", "Robustness studies")->require_subcommand(1);
  s->fallthrough();
  leaf(*s, "nmr", "NMR under random exclusion", {"sensitivity-nmr"});
  leaf(*s, "fnbd", "FNBD under random exclusion", {"sensitivity-fnbd"});
  leaf(*s, "padding", "NMR across paddings", {"sensitivity-padding"});
  auto* y = app.add_subcommand("synth", "Synthetic corpora")->require_subcommand(1);
  y->fallthrough();
  leaf(*y, "generate", "Generate a corpus with ground truth", {"synth-generate"});
  leaf(*y, "score", "Score pipeline outputs against ground truth", {"synth-score"});
  leaf(app, "run", "Run ingest through all metrics",
       {"ingest", "fill-countries", "disambiguate", "classify-fields", "classify-mobility", "metrics-nmr",
        "metrics-fnbd", "metrics-citations", "metrics-flows"});

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  const auto level = spdlog::level::from_str(o.log_level);
  spdlog::set_level(level);

  Pipeline pipeline(o, out);
  try {
    std::error_code ec;
    fs::create_directories(o.output_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + o.output_dir + ": " + ec.message());
    const std::map<std::string, RowCounts (Pipeline::*)()> bodies{
        {"ingest", &Pipeline::ingest},
        {"fill-countries", &Pipeline::fill_countries},
        {"disambiguate", &Pipeline::disambiguate},
        {"classify-fields", &Pipeline::classify_fields},
        {"classify-mobility", &Pipeline::classify_mobility},
        {"metrics-nmr", &Pipeline::metrics_nmr},
        {"metrics-fnbd", &Pipeline::metrics_fnbd},
        {"metrics-citations", &Pipeline::metrics_citations},
        {"metrics-flows", &Pipeline::metrics_flows},
        {"sensitivity-nmr", &Pipeline::sensitivity_nmr},
        {"sensitivity-fnbd", &Pipeline::sensitivity_fnbd},
        {"sensitivity-padding", &Pipeline::sensitivity_padding},
        {"synth-generate", &Pipeline::synth_generate},
        {"synth-score", &Pipeline::synth_score},
    };
    for (const auto& name : stages) {
      pipeline.stage(name, [&] { return (pipeline.*bodies.at(name))(); });
    }
  } catch (const StageOrderError& e) {
    err << fmt::format("error [{}/{}]: {}\n", pipeline.current(), module_of(pipeline.current()), e.what());
    return kStageOrderError;
  } catch (const ConfigError& e) {
    err << fmt::format("error [{}/{}]: {}\n", pipeline.current(), module_of(pipeline.current()), e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << fmt::format("error [{}/{}]: {}\n", pipeline.current(), module_of(pipeline.current()), e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    err << fmt::format("error [{}/{}]: {}\n", pipeline.current(), module_of(pipeline.current()), e.what());
    return kDataError;
  }
  return kSuccess;
}

}  // namespace scholmig::cli

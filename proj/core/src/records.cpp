#include "scholmig/records.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "scholmig/csv.hpp"
#include "scholmig/error.hpp"
#include "scholmig/text.hpp"

namespace scholmig {

namespace {

constexpr int kMinYear = 1900;
constexpr std::size_t kColumnCount = std::size(kCorpusColumns);

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int value{};
  if (s.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Field-level validation shared by the CSV and JSON-lines readers. Returns an
// error message or an empty string.
std::string validate(const AuthorshipRecord& r, int snapshot_year) {
  if (r.author_id.empty()) return "empty author_id";
  if (r.pub_id.empty()) return "empty pub_id";
  if (r.year < kMinYear || r.year > snapshot_year) {
    return "year " + std::to_string(r.year) + " outside [" + std::to_string(kMinYear) + ", " +
           std::to_string(snapshot_year) + "]";
  }
  if (r.citation_count < 0) return "negative citation_count";
  for (int code : r.asjc_codes) {
    if (code < 1000 || code > 9999) return "asjc code " + std::to_string(code) + " is not 4 digits";
  }
  for (const std::string* s : {&r.author_id, &r.pub_id, &r.affiliation_text}) {
    if (!is_valid_utf8(*s)) return "invalid UTF-8";
  }
  return {};
}

std::string parse_asjc_list(std::string_view field, std::vector<int>& codes) {
  codes.clear();
  if (field.empty()) return {};
  for (auto piece : split(field, ';')) {
    auto code = parse_int<int>(piece);
    if (!code || piece.size() != 4) return "bad asjc code '" + std::string(piece) + "'";
    codes.push_back(*code);
  }
  return {};
}

std::string record_from_csv(const std::vector<std::string>& f, AuthorshipRecord& r) {
  if (f.size() != kColumnCount) {
    return "expected " + std::to_string(kColumnCount) + " fields, got " + std::to_string(f.size());
  }
  r.author_id = f[0];
  r.pub_id = f[1];
  auto year = parse_int<int>(f[2]);
  if (!year) return "bad year '" + f[2] + "'";
  r.year = *year;
  r.affiliation_text = f[3];
  auto country = Country::parse(f[4]);
  if (!country) return "bad country '" + f[4] + "'";
  r.country = *country;
  if (auto err = parse_asjc_list(f[5], r.asjc_codes); !err.empty()) return err;
  auto cites = parse_int<std::int64_t>(f[6]);
  if (!cites) return "bad citation_count '" + f[6] + "'";
  r.citation_count = *cites;
  return {};
}

std::string record_from_json(std::string_view line, AuthorshipRecord& r) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    return std::string("invalid JSON: ") + e.what();
  }
  if (!j.is_object()) return "row is not a JSON object";
  try {
    for (const char* key : kCorpusColumns) {
      if (!j.contains(key)) return std::string("missing field '") + key + "'";
    }
    r.author_id = j.at("author_id").get<std::string>();
    r.pub_id = j.at("pub_id").get<std::string>();
    r.year = j.at("year").get<int>();
    r.affiliation_text = j.at("affiliation_text").get<std::string>();
    const auto& c = j.at("country");
    const std::string code = c.is_null() ? std::string() : c.get<std::string>();
    auto country = Country::parse(code);
    if (!country) return "bad country '" + code + "'";
    r.country = *country;
    const auto& codes = j.at("asjc_codes");
    if (codes.is_string()) {
      if (auto err = parse_asjc_list(codes.get<std::string>(), r.asjc_codes); !err.empty()) return err;
    } else {
      r.asjc_codes = codes.get<std::vector<int>>();
    }
    r.citation_count = j.at("citation_count").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    return std::string("bad field type: ") + e.what();
  }
  return {};
}

struct RawRow {
  std::size_t line;
  AuthorshipRecord record;
};

ParsedCorpus finish(std::vector<RawRow> rows, ParseReport report, const ParseOptions& options) {
  if (report.rows_read > 0 &&
      static_cast<double>(report.errors.size()) >
          options.max_malformed_fraction * static_cast<double>(report.rows_read)) {
    throw SchemaMismatch(std::to_string(report.errors.size()) + " of " +
                         std::to_string(report.rows_read) +
                         " rows are malformed; input does not match the corpus schema");
  }

  ParsedCorpus out;
  out.corpus.snapshot_year = options.snapshot_year;
  out.corpus.records.reserve(rows.size());

  std::unordered_map<std::string, std::int64_t> citations;
  std::unordered_set<std::string> seen;
  for (auto& row : rows) {
    auto& r = row.record;
    auto [it, inserted] = citations.emplace(r.pub_id, r.citation_count);
    if (!inserted && it->second != r.citation_count) {
      report.errors.push_back({row.line, "citation_count " + std::to_string(r.citation_count) +
                                             " disagrees with " + std::to_string(it->second) +
                                             " seen earlier for pub_id " + r.pub_id});
      continue;
    }
    std::string key = r.author_id;
    for (std::string_view part : {std::string_view(r.pub_id), std::string_view(r.affiliation_text),
                                  r.country.code()}) {
      key.push_back('\x1f');
      key.append(part);
    }
    if (!seen.insert(std::move(key)).second) {
      ++report.duplicates_removed;
      continue;
    }
    out.corpus.records.push_back(std::move(r));
  }
  if (report.duplicates_removed > 0) {
    spdlog::info("removed {} duplicate authorship records", report.duplicates_removed);
  }
  if (!report.errors.empty()) {
    spdlog::warn("{} malformed rows collected in the error report", report.errors.size());
  }
  out.report = std::move(report);
  return out;
}

}  // namespace

bool canonical_less(const AuthorshipRecord& a, const AuthorshipRecord& b) {
  return std::tie(a.author_id, a.year, a.pub_id, a.affiliation_text, a.country, a.asjc_codes,
                  a.citation_count) < std::tie(b.author_id, b.year, b.pub_id, b.affiliation_text,
                                               b.country, b.asjc_codes, b.citation_count);
}

std::size_t AuthorDossier::publication_count() const {
  std::unordered_set<std::string_view> pubs;
  for (const auto& r : records) pubs.insert(r.pub_id);
  return pubs.size();
}

ParsedCorpus parse_corpus(std::istream& in, InputFormat format, const ParseOptions& options) {
  std::vector<RawRow> rows;
  ParseReport report;

  if (format == InputFormat::kJsonLines) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      ++report.rows_read;
      RawRow row{line_no, {}};
      auto err = record_from_json(line, row.record);
      if (err.empty()) err = validate(row.record, options.snapshot_year);
      if (!err.empty()) {
        report.errors.push_back({line_no, std::move(err)});
        continue;
      }
      rows.push_back(std::move(row));
    }
    return finish(std::move(rows), std::move(report), options);
  }

  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw SchemaMismatch("empty input: missing CSV header");
  bool header_ok = fields.size() == kColumnCount;
  for (std::size_t i = 0; header_ok && i < kColumnCount; ++i) {
    header_ok = fields[i] == kCorpusColumns[i];
  }
  if (!header_ok) {
    std::string got;
    for (const auto& f : fields) got += (got.empty() ? "" : ",") + f;
    throw SchemaMismatch("header mismatch: expected "
                         "author_id,pub_id,year,affiliation_text,country,asjc_codes,citation_count; got " +
                         got);
  }
  for (;;) {
    bool more;
    try {
      more = reader.next(fields);
    } catch (const DataError& e) {
      ++report.rows_read;
      report.errors.push_back({reader.line(), e.what()});
      break;
    }
    if (!more) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++report.rows_read;
    RawRow row{reader.line(), {}};
    auto err = record_from_csv(fields, row.record);
    if (err.empty()) err = validate(row.record, options.snapshot_year);
    if (!err.empty()) {
      report.errors.push_back({reader.line(), std::move(err)});
      continue;
    }
    rows.push_back(std::move(row));
  }
  return finish(std::move(rows), std::move(report), options);
}

ParsedCorpus parse_corpus(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  InputFormat format = options.format;
  if (format == InputFormat::kAuto) {
    const auto ext = path.extension().string();
    format = (ext == ".jsonl" || ext == ".ndjson") ? InputFormat::kJsonLines : InputFormat::kCsv;
  }
  return parse_corpus(in, format, options);
}

namespace {

std::string join_codes(const std::vector<int>& codes) {
  std::string out;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (i) out.push_back(';');
    out += std::to_string(codes[i]);
  }
  return out;
}

}  // namespace

void write_corpus_csv(const Corpus& corpus, std::ostream& out) {
  CsvWriter w(out);
  w.write_row({std::begin(kCorpusColumns), std::end(kCorpusColumns)});
  for (const auto& r : corpus.records) {
    w.write_row({r.author_id, r.pub_id, std::to_string(r.year), r.affiliation_text, r.country.str(),
                 join_codes(r.asjc_codes), std::to_string(r.citation_count)});
  }
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& r : corpus.records) {
    nlohmann::ordered_json j;
    j["author_id"] = r.author_id;
    j["pub_id"] = r.pub_id;
    j["year"] = r.year;
    j["affiliation_text"] = r.affiliation_text;
    j["country"] = r.country.str();
    j["asjc_codes"] = r.asjc_codes;
    j["citation_count"] = r.citation_count;
    out << j.dump() << '\n';
  }
}

void write_row_errors_csv(const std::vector<RowError>& errors, std::ostream& out) {
  CsvWriter w(out);
  w.row("line", "message");
  for (const auto& e : errors) w.row(std::to_string(e.line), e.message);
}

std::vector<AuthorDossier> group_by_author(const Corpus& corpus) {
  std::vector<const AuthorshipRecord*> order;
  order.reserve(corpus.records.size());
  for (const auto& r : corpus.records) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const AuthorshipRecord* a, const AuthorshipRecord* b) { return canonical_less(*a, *b); });

  std::vector<AuthorDossier> dossiers;
  for (const AuthorshipRecord* r : order) {
    if (dossiers.empty() || dossiers.back().author_id != r->author_id) {
      AuthorDossier d;
      d.author_id = r->author_id;
      d.first_year = r->year;
      d.last_year = r->year;
      dossiers.push_back(std::move(d));
    }
    auto& d = dossiers.back();
    d.first_year = std::min(d.first_year, r->year);
    d.last_year = std::max(d.last_year, r->year);
    d.records.push_back(*r);
  }
  return dossiers;
}

}  // namespace scholmig

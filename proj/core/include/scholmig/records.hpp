#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "scholmig/country.hpp"

namespace scholmig {

/// One author-affiliation-publication linkage. A publication with k
/// affiliations appears as k records; each record carries at most one
/// country.
struct AuthorshipRecord {
  std::string author_id;
  std::string pub_id;
  int year = 0;
  std::string affiliation_text;
  Country country;
  std::vector<int> asjc_codes;
  std::int64_t citation_count = 0;

  friend bool operator==(const AuthorshipRecord&, const AuthorshipRecord&) = default;
};

/// Total order used wherever record order must not depend on input order.
bool canonical_less(const AuthorshipRecord& a, const AuthorshipRecord& b);

struct Corpus {
  std::vector<AuthorshipRecord> records;
  int snapshot_year = 2020;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// All records of one author ID, in canonical order.
struct AuthorDossier {
  std::string author_id;
  std::vector<AuthorshipRecord> records;
  int first_year = 0;
  int last_year = 0;

  std::size_t publication_count() const;
};

enum class InputFormat { kAuto, kCsv, kJsonLines };

struct ParseOptions {
  InputFormat format = InputFormat::kAuto;
  int snapshot_year = 2020;
  /// Above this share of malformed rows the whole file is rejected.
  double max_malformed_fraction = 0.5;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct ParseReport {
  std::size_t rows_read = 0;
  std::size_t duplicates_removed = 0;
  std::vector<RowError> errors;
};

struct ParsedCorpus {
  Corpus corpus;
  ParseReport report;
};

inline constexpr const char* kCorpusColumns[] = {
    "author_id", "pub_id", "year", "affiliation_text", "country", "asjc_codes", "citation_count"};

/// Reads a CSV or JSON-lines corpus. kAuto picks JSON-lines for .jsonl/.ndjson
/// extensions and CSV otherwise.
///
/// Malformed rows go to the report; exact duplicates on (author_id, pub_id,
/// affiliation_text, country) are dropped and counted. Throws IoError when the
/// file cannot be read and SchemaMismatch on a bad header or when more than
/// max_malformed_fraction of the rows are malformed.
ParsedCorpus parse_corpus(const std::filesystem::path& path, const ParseOptions& options = {});
ParsedCorpus parse_corpus(std::istream& in, InputFormat format, const ParseOptions& options = {});

void write_corpus_csv(const Corpus& corpus, std::ostream& out);
void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);
void write_row_errors_csv(const std::vector<RowError>& errors, std::ostream& out);

/// One dossier per distinct author_id, sorted by author_id.
std::vector<AuthorDossier> group_by_author(const Corpus& corpus);

}  // namespace scholmig

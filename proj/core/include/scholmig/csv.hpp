#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace scholmig {

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// line breaks. Both LF and CRLF line endings are accepted.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads the next row into `fields`. Returns false at end of input.
  /// Throws DataError on an unterminated quoted field.
  bool next(std::vector<std::string>& fields);

  /// 1-based physical line on which the last returned row started.
  std::size_t line() const { return row_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t row_line_ = 0;
  bool first_row_ = true;
};

/// Quotes a field only when it contains a delimiter, quote or line break.
std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void write_row(const std::vector<std::string>& fields);

  template <typename... Fields>
  void row(const Fields&... fields) {
    write_row(std::vector<std::string>{std::string(fields)...});
  }

 private:
  std::ostream& out_;
};

/// Shortest round-trippable decimal form of a double ("0.2", "12.7").
std::string format_number(double value);

}  // namespace scholmig

#include "scholmig/csv.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "scholmig/error.hpp"

namespace scholmig {

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  int c = in_.get();
  if (c == std::char_traits<char>::eof()) return false;
  if (first_row_) {
    first_row_ = false;
    // UTF-8 byte order mark
    if (c == 0xEF && in_.peek() == 0xBB) {
      in_.get();
      if (in_.get() != 0xBF) throw DataError("malformed byte order mark");
      c = in_.get();
      if (c == std::char_traits<char>::eof()) return false;
    }
  }
  row_line_ = line_;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  for (;; c = in_.get()) {
    if (c == std::char_traits<char>::eof()) {
      if (quoted) {
        throw DataError("line " + std::to_string(row_line_) + ": unterminated quoted field");
      }
      fields.push_back(std::move(field));
      return true;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        break;
      case '"':
        if (field.empty() && !field_was_quoted) {
          quoted = true;
          field_was_quoted = true;
        } else {
          field.push_back(ch);
        }
        break;
      case '\r':
        if (in_.peek() == '\n') break;
        field.push_back(ch);
        break;
      case '\n':
        ++line_;
        fields.push_back(std::move(field));
        return true;
      default:
        field.push_back(ch);
    }
  }
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_.put(',');
    out_ << csv_escape(fields[i]);
  }
  out_.put('\n');
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace scholmig

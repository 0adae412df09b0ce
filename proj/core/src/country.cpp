#include "scholmig/country.hpp"

#include <stdexcept>
#include <string>

namespace scholmig {

std::optional<Country> Country::parse(std::string_view code) {
  Country c;
  if (code.empty()) return c;
  if (code.size() != 2) return std::nullopt;
  for (char ch : code) {
    if (ch < 'A' || ch > 'Z') return std::nullopt;
  }
  c.code_ = {code[0], code[1]};
  return c;
}

Country Country::from_code(std::string_view code) {
  auto c = parse(code);
  if (!c) throw std::invalid_argument("invalid country code '" + std::string(code) + "'");
  return *c;
}

}  // namespace scholmig

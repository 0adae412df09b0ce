#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace scholmig {

/// ISO 3166-1 alpha-2 country code. A default-constructed Country is
/// UNKNOWN; the same value doubles as UNDETERMINED for origin/destination.
class Country {
 public:
  constexpr Country() = default;

  /// Two uppercase ASCII letters, or empty for UNKNOWN. Anything else is
  /// rejected.
  static std::optional<Country> parse(std::string_view code);

  /// Like parse() but throws std::invalid_argument.
  static Country from_code(std::string_view code);

  constexpr bool known() const { return code_[0] != '\0'; }
  std::string_view code() const {
    return known() ? std::string_view(code_.data(), 2) : std::string_view();
  }
  std::string str() const { return std::string(code()); }

  friend constexpr auto operator<=>(const Country&, const Country&) = default;

 private:
  std::array<char, 2> code_{'\0', '\0'};
};

inline constexpr Country kUnknownCountry{};

}  // namespace scholmig

template <>
struct std::hash<scholmig::Country> {
  std::size_t operator()(const scholmig::Country& c) const noexcept {
    return std::hash<std::string_view>{}(c.code());
  }
};

#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "hlob/errors.hpp"
#include "hlob/types.hpp"

namespace hlob::detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

inline double parse_double(std::string_view field, std::string_view what, std::size_t lineno) {
  try {
    std::size_t used = 0;
    const std::string text(field);
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw DataError("unparsable " + std::string(what) + " '" + std::string(field) + "'", lineno);
}

template <typename Int>
Int parse_int(std::string_view field, std::string_view what, std::size_t lineno) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
    throw DataError("unparsable " + std::string(what) + " '" + std::string(field) + "'", lineno);
  return v;
}

inline OrderKind parse_kind(std::string_view field, std::size_t lineno) {
  if (field == "L") return OrderKind::Limit;
  if (field == "M") return OrderKind::Market;
  if (field == "C") return OrderKind::Cancel;
  throw DataError("kind must be L, M or C", lineno);
}

inline Side parse_side(std::string_view field, std::size_t lineno) {
  if (field == "B") return Side::Bid;
  if (field == "A") return Side::Ask;
  throw DataError("side must be B or A", lineno);
}

}  // namespace hlob::detail

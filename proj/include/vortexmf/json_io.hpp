#ifndef VORTEXMF_JSON_IO_HPP
#define VORTEXMF_JSON_IO_HPP

// JSON emission with every floating-point value written as a 17-significant
// digit decimal, so a parse of the output restores each double bit-exactly.

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "json.hpp"

namespace vortexmf {

using Json = nlohmann::json;

/// Decimal with `digits` significant digits; non-finite values become null
/// in JSON contexts and "nan"/"inf" text elsewhere.
inline std::string format_double(double value, int digits = 17) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value,
                                 std::chars_format::general, digits);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

namespace detail {

inline void write_json_value(std::ostream& os, const Json& j, int indent,
                             int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
  case Json::value_t::object: {
    if (j.empty()) { os << "{}"; return; }
    os << '{';
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ',';
      first = false;
      newline(depth + 1);
      os << Json(it.key()).dump() << (indent < 0 ? ":" : ": ");
      write_json_value(os, it.value(), indent, depth + 1);
    }
    newline(depth);
    os << '}';
    return;
  }
  case Json::value_t::array: {
    if (j.empty()) { os << "[]"; return; }
    // arrays of scalars stay on one line
    bool scalars = true;
    for (const auto& v : j) scalars = scalars && !v.is_structured();
    os << '[';
    bool first = true;
    for (const auto& v : j) {
      if (!first) os << (scalars ? ", " : ",");
      first = false;
      if (!scalars) newline(depth + 1);
      write_json_value(os, v, indent, depth + 1);
    }
    if (!scalars) newline(depth);
    os << ']';
    return;
  }
  case Json::value_t::number_float: {
    const double v = j.get<double>();
    if (!std::isfinite(v)) { os << "null"; return; }
    os << format_double(v);
    return;
  }
  default:
    os << j.dump();
  }
}

} // namespace detail

/// indent < 0 writes a single line (JSON-lines records).
inline void write_json(std::ostream& os, const Json& j, int indent = 2) {
  detail::write_json_value(os, j, indent, 0);
}

inline std::string to_json_text(const Json& j, int indent = 2) {
  std::ostringstream os;
  write_json(os, j, indent);
  return os.str();
}

} // namespace vortexmf

#endif // VORTEXMF_JSON_IO_HPP

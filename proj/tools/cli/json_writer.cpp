#include "cli/json_writer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mdh::cli {

namespace {

void write_double(std::ostream& out, double x) {
  if (!std::isfinite(x)) {
    out << "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string text(buf);
  // Keep integral doubles recognisable as floating point.
  if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
  out << text;
}

void write_value(std::ostream& out, const Json& v, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(it.key()).dump() << ": ";
        write_value(out, it.value(), indent, depth + 1);
      }
      out << "\n" << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_primitive(); });
      out << (flat ? "[" : "[\n");
      bool first = true;
      for (const auto& e : v) {
        if (!first) out << (flat ? ", " : ",\n");
        first = false;
        if (!flat) out << pad;
        write_value(out, e, indent, depth + 1);
      }
      if (!flat) out << "\n" << close_pad;
      out << "]";
      return;
    }
    case Json::value_t::number_float:
      write_double(out, v.get<double>());
      return;
    default:
      out << v.dump();
  }
}

}  // namespace

void write_json(std::ostream& out, const Json& value, int indent) {
  write_value(out, value, indent, 0);
  out << "\n";
}

std::string to_json_text(const Json& value) {
  std::ostringstream out;
  write_json(out, value);
  return out.str();
}

}  // namespace mdh::cli

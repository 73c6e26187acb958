#pragma once

// Canonical JSON serialization for manifests and cache keys.
//
// Canonical form: object keys in lexicographic order (nlohmann::json's
// default std::map ordering), UTF-8, no insignificant whitespace, floats
// rendered as fixed 6-decimal values with trailing zeros trimmed (at least
// one fractional digit kept). Reloading a canonical document and dumping it
// again reproduces the same bytes.

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "mabench/error.hpp"

namespace mabench {

inline std::string canonical_double(double v) {
  if (!std::isfinite(v)) throw DataError("non-finite number in manifest output");
  if (v == 0.0) return "0.0";  // avoids "-0.0"
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  std::size_t last = s.find_last_not_of('0');
  if (s[last] == '.') ++last;  // keep one fractional digit
  s.erase(last + 1);
  return s;
}

inline void canonical_dump_to(const nlohmann::json& v, std::string& out) {
  using value_t = nlohmann::json::value_t;
  switch (v.type()) {
    case value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        canonical_dump_to(it.value(), out);
      }
      out += '}';
      break;
    }
    case value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        canonical_dump_to(v[i], out);
      }
      out += ']';
      break;
    }
    case value_t::string:
      out += v.dump();
      break;
    case value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      break;
    case value_t::number_integer:
    case value_t::number_unsigned:
      out += v.dump();
      break;
    case value_t::number_float:
      out += canonical_double(v.get<double>());
      break;
    case value_t::null:
      out += "null";
      break;
    default:
      throw DataError("unsupported JSON value in canonical dump");
  }
}

inline std::string canonical_dump(const nlohmann::json& v) {
  std::string out;
  canonical_dump_to(v, out);
  return out;
}

}  // namespace mabench

// Tabular bound reports and their CSV serialization.
#pragma once

#include "redset/io.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace redset {

inline constexpr const char* kToolVersion = "redset 1.0.0";

enum class BoundSide { lower, upper };

struct BoundsRow {
  std::string model;
  std::optional<double> gamma;
  std::string method;  // open_chain, ring, marginal_relaxation, mps
  int parameter = 0;   // N for lower bounds, D for mps
  double value = 0.0;
  double slack = 0.0;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  BoundSide side = BoundSide::lower;
};

inline int method_rank(const std::string& m) {
  if (m == "open_chain") return 0;
  if (m == "ring") return 1;
  if (m == "marginal_relaxation") return 2;
  if (m == "mps") return 3;
  return 4;
}

/// Quotes a CSV field when it contains a delimiter, quote or newline.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class BoundsReport {
 public:
  void add(BoundsRow row) { rows_.push_back(std::move(row)); }
  const std::vector<BoundsRow>& rows() const { return rows_; }

  /// Rows ordered by (model, gamma, method, parameter); independent of the
  /// order in which they were computed.
  void sort() {
    std::stable_sort(rows_.begin(), rows_.end(), [](const BoundsRow& a, const BoundsRow& b) {
      return std::make_tuple(a.model, a.gamma.value_or(0.0), method_rank(a.method), a.method, a.parameter) <
             std::make_tuple(b.model, b.gamma.value_or(0.0), method_rank(b.method), b.method, b.parameter);
    });
  }

  /// Description of the first pair with lower.value - lower.slack above an
  /// upper value for the same model instance, if any.
  std::optional<std::string> sandwich_violation() const {
    for (const auto& lo : rows_) {
      if (lo.side != BoundSide::lower) continue;
      for (const auto& up : rows_) {
        if (up.side != BoundSide::upper || up.model != lo.model || up.gamma != lo.gamma) continue;
        if (lo.value - lo.slack > up.value) {
          std::ostringstream os;
          os << "lower bound " << lo.method << "(N=" << lo.parameter << ") = " << format_real(lo.value)
             << " (slack " << format_real(lo.slack) << ") exceeds upper bound " << up.method
             << "(D=" << up.parameter << ") = " << format_real(up.value);
          return os.str();
        }
      }
    }
    return std::nullopt;
  }

  static const char* header() { return "model,gamma,method,N,value,slack,seconds,seed"; }

  /// Rows only; `seconds` is written only when `timings` is set so that the
  /// body is reproducible byte for byte by default.
  void write_body(std::ostream& os, bool timings) const {
    os << header() << '\n';
    for (const auto& r : rows_) {
      os << csv_field(r.model) << ',' << (r.gamma ? format_real(*r.gamma) : "") << ',' << r.method << ','
         << r.parameter << ',' << format_real(r.value) << ',' << format_real(r.slack) << ','
         << (timings ? format_real(r.seconds) : "") << ',' << r.seed << '\n';
    }
  }

 private:
  std::vector<BoundsRow> rows_;
};

/// "# key: value" comment lines preceding a CSV body.
inline void write_comment_header(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& entries) {
  os << "# " << kToolVersion << '\n';
  for (const auto& [k, v] : entries) {
    std::string line = v;
    std::replace(line.begin(), line.end(), '\n', ' ');
    os << "# " << k << ": " << line << '\n';
  }
}

}  // namespace redset

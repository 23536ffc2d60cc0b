// Text and JSON formats for density matrices and Hamiltonians.
//
// Density matrix text format:
//   d M
//   <d^M lines, each with d^M whitespace-separated entries "re+imj">
//
// Hamiltonian JSON format:
//   {"local_dim": 2, "terms": [{"ops": ["X", "X"], "coeff": 1.0}, ...]}
//
// MPS JSON format:
//   {"d": 2, "bond_dim": D, "tensors": [[[[re, im], ...row...], ...], ...]}
#pragma once

#include "redset/hermitian.hpp"
#include "redset/mps.hpp"
#include "redset/pauli.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace redset {

/// Thrown for malformed input files; maps to the CLI's input-error exit code.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-tripping decimal form ("%.17g").
inline std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_complex(cplx z) {
  std::string s = format_real(z.real());
  const double im = z.imag();
  if (std::signbit(im)) {
    s += '-';
    s += format_real(-im);
  } else {
    s += '+';
    s += format_real(im);
  }
  s += 'j';
  return s;
}

/// Parses "re+imj", "re-imj", "re", or "imj".
inline cplx parse_complex(std::string_view tok) {
  std::string t(tok);
  if (t.empty()) throw InputError("empty complex entry");
  auto to_double = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw InputError("malformed number '" + std::string(tok) + "'");
    }
    if (pos != s.size()) throw InputError("malformed number '" + std::string(tok) + "'");
    return v;
  };
  if (t.back() != 'j' && t.back() != 'J') return {to_double(t), 0.0};
  t.pop_back();
  // The imaginary part starts at the last sign that is not an exponent sign
  // and not the leading character.
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, to_double(t)};
  return {to_double(t.substr(0, split)), to_double(t.substr(split))};
}

inline void write_density_text(std::ostream& os, const HermitianOp& op) {
  os << op.local_dim() << ' ' << op.sites() << '\n';
  const auto& m = op.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << format_complex(m(r, c));
    }
    os << '\n';
  }
}

/// Reads a Hermitian operator; does not check positivity or trace.
inline HermitianOp read_operator_text(std::istream& is) {
  int d = 0;
  int sites = 0;
  if (!(is >> d >> sites)) throw InputError("missing 'd M' header");
  if (d < 2 || sites < 1 || sites > 12) throw InputError("header values out of range");
  const auto n = detail::int_pow(d, sites);
  CMatrix m(n, n);
  std::string tok;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!(is >> tok)) throw InputError("too few matrix entries");
      m(r, c) = parse_complex(tok);
    }
  }
  if (is >> tok) throw InputError("trailing data after matrix entries");
  try {
    return HermitianOp(d, sites, std::move(m));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

inline DensityMatrix read_density_text(std::istream& is) {
  auto op = read_operator_text(is);
  try {
    return DensityMatrix(std::move(op));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

inline DensityMatrix read_density_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_density_text(in);
}

inline void write_density_file(const std::string& path, const HermitianOp& op) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_density_text(out, op);
}

inline PauliTwoBodyHamiltonian hamiltonian_from_json(const nlohmann::json& j) {
  try {
    if (j.value("local_dim", 2) != 2) throw InputError("only local_dim = 2 is supported");
    PauliTwoBodyHamiltonian h;
    for (const auto& term : j.at("terms")) {
      const auto& ops = term.at("ops");
      if (!ops.is_array() || ops.size() != 2) throw InputError("each term needs exactly two ops");
      const auto a = ops[0].get<std::string>();
      const auto b = ops[1].get<std::string>();
      if (a.size() != 1 || b.size() != 1) throw InputError("op labels must be one of I, X, Y, Z");
      h.add(pauli_from_label(a[0]), pauli_from_label(b[0]), term.at("coeff").get<double>());
    }
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad Hamiltonian JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

inline nlohmann::json hamiltonian_to_json(const PauliTwoBodyHamiltonian& h) {
  nlohmann::json terms = nlohmann::json::array();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double c = h.coeff(static_cast<Pauli>(a), static_cast<Pauli>(b));
      if (c == 0.0) continue;
      terms.push_back({{"ops", {std::string(1, pauli_label(static_cast<Pauli>(a))),
                                std::string(1, pauli_label(static_cast<Pauli>(b)))}},
                       {"coeff", c}});
    }
  }
  return {{"local_dim", 2}, {"terms", terms}};
}

inline PauliTwoBodyHamiltonian read_hamiltonian_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad JSON in ") + path + ": " + e.what());
  }
  return hamiltonian_from_json(j);
}

inline nlohmann::json mps_to_json(const UniformMPS& a) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : a.tensors) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < t.cols(); ++j) row.push_back({t(i, j).real(), t(i, j).imag()});
      rows.push_back(std::move(row));
    }
    tensors.push_back(std::move(rows));
  }
  return {{"d", a.d}, {"bond_dim", a.bond_dim}, {"tensors", std::move(tensors)}};
}

inline UniformMPS mps_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("d").get<int>();
    const int D = j.at("bond_dim").get<int>();
    if (d < 2 || D < 1 || D > 64) throw InputError("MPS dimensions out of range");
    const auto& tj = j.at("tensors");
    if (!tj.is_array() || static_cast<int>(tj.size()) != d) throw InputError("MPS needs d tensors");
    std::vector<CMatrix> a;
    for (const auto& rows : tj) {
      if (!rows.is_array() || static_cast<int>(rows.size()) != D) throw InputError("MPS tensor row count");
      CMatrix t(D, D);
      for (int i = 0; i < D; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != D) throw InputError("MPS tensor column count");
        for (int k = 0; k < D; ++k) {
          const auto& z = row[static_cast<std::size_t>(k)];
          if (!z.is_array() || z.size() != 2) throw InputError("MPS entries are [re, im] pairs");
          t(i, k) = cplx(z[0].get<double>(), z[1].get<double>());
        }
      }
      a.push_back(std::move(t));
    }
    return {d, D, std::move(a)};
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad MPS JSON: ") + e.what());
  }
}

}  // namespace redset

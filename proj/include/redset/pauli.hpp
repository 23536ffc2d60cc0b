// Two-body Hamiltonians of qubit chains expanded in the Pauli product basis.
#pragma once

#include "redset/hermitian.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace redset {

enum class Pauli : int { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_label(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline Pauli pauli_from_label(char c) {
  switch (c) {
    case 'I': case 'i': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default: throw std::invalid_argument(std::string("unknown Pauli label '") + c + "'");
  }
}

inline Eigen::Matrix2cd pauli_matrix(Pauli p) {
  Eigen::Matrix2cd m;
  const cplx i1{0.0, 1.0};
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -i1, i1, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

/// One-site Pauli operator as a HermitianOp.
inline HermitianOp pauli_op(Pauli p) { return make_trusted(2, 1, CMatrix(pauli_matrix(p))); }

/// h = sum_{a,b} c_ab sigma_a (x) sigma_b over a, b in {I, X, Y, Z}.
class PauliTwoBodyHamiltonian {
 public:
  PauliTwoBodyHamiltonian() { coeffs_.fill(0.0); }

  double coeff(Pauli a, Pauli b) const { return coeffs_[index(a, b)]; }
  void set(Pauli a, Pauli b, double c) { coeffs_[index(a, b)] = c; }
  PauliTwoBodyHamiltonian& add(Pauli a, Pauli b, double c) {
    coeffs_[index(a, b)] += c;
    return *this;
  }

  const std::array<double, 16>& coeffs() const { return coeffs_; }

  double max_abs_diff(const PauliTwoBodyHamiltonian& o) const {
    double m = 0.0;
    for (std::size_t k = 0; k < 16; ++k) m = std::max(m, std::abs(coeffs_[k] - o.coeffs_[k]));
    return m;
  }

  friend bool operator==(const PauliTwoBodyHamiltonian&, const PauliTwoBodyHamiltonian&) = default;

 private:
  static std::size_t index(Pauli a, Pauli b) {
    return static_cast<std::size_t>(static_cast<int>(a) * 4 + static_cast<int>(b));
  }
  std::array<double, 16> coeffs_{};
};

inline HermitianOp pauli_to_matrix(const PauliTwoBodyHamiltonian& h) {
  CMatrix m = CMatrix::Zero(4, 4);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double c = h.coeff(static_cast<Pauli>(a), static_cast<Pauli>(b));
      if (c == 0.0) continue;
      m += c * kron(pauli_op(static_cast<Pauli>(a)), pauli_op(static_cast<Pauli>(b))).matrix();
    }
  }
  return make_trusted(2, 2, std::move(m));
}

/// Coefficients c_ab = tr(A sigma_a (x) sigma_b) / 4 of a two-qubit operator.
/// Throws if any coefficient has an imaginary part above kHermitianTol.
inline PauliTwoBodyHamiltonian matrix_to_pauli(const CMatrix& a) {
  if (a.rows() != 4 || a.cols() != 4) {
    throw std::invalid_argument("matrix_to_pauli: expected a 4x4 two-qubit operator");
  }
  PauliTwoBodyHamiltonian h;
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      const CMatrix basis = kron(pauli_op(static_cast<Pauli>(p)), pauli_op(static_cast<Pauli>(q))).matrix();
      const cplx c = (a * basis).trace() / 4.0;
      if (std::abs(c.imag()) > kHermitianTol) {
        throw std::invalid_argument("matrix_to_pauli: operator is not Hermitian");
      }
      h.set(static_cast<Pauli>(p), static_cast<Pauli>(q), c.real());
    }
  }
  return h;
}

inline PauliTwoBodyHamiltonian matrix_to_pauli(const HermitianOp& a) {
  if (a.local_dim() != 2 || a.sites() != 2) {
    throw std::invalid_argument("matrix_to_pauli: expected a two-qubit operator");
  }
  return matrix_to_pauli(a.matrix());
}

// Built-in models.

inline PauliTwoBodyHamiltonian zz_model(double j = 1.0) {
  PauliTwoBodyHamiltonian h;
  h.set(Pauli::Z, Pauli::Z, j);
  return h;
}

/// XX + YY + ZZ.
inline PauliTwoBodyHamiltonian heisenberg_model() {
  PauliTwoBodyHamiltonian h;
  h.set(Pauli::X, Pauli::X, 1.0);
  h.set(Pauli::Y, Pauli::Y, 1.0);
  h.set(Pauli::Z, Pauli::Z, 1.0);
  return h;
}

}  // namespace redset

#pragma once

// Composite parameterization of U(q) (Spengler-Huber-Hiesmayr): any unitary
// factors into plane rotations, relative phases, and diagonal phases,
//
//   U = [ prod_{m=1}^{q-1} prod_{n=m+1}^{q} exp(i P_n l_{n,m}) exp(i s_{m,n} l_{m,n}) ]
//       [ prod_{l=1}^{q} exp(i P_l l_{l,l}) ]
//
// with P_l = |l><l| and s_{m,n} = -i|m><n| + i|n><m|.  Products are applied
// left to right in loop order.  Measurement bases only need the first
// bracket (global column phases cancel in projectors), giving q^2 - q real
// angles per basis.
//
// Canonical packing used throughout this library (0-based m < n):
//   for m = 0..q-2, n = m+1..q-1:  [ phase l_{n,m} in [0, 2pi],
//                                    rotation l_{m,n} in [0, pi/2] ]
// and, for full unitaries, q diagonal phases in [0, 2pi] appended.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tacit/errors.hpp"

namespace tacit {

using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

inline int basis_param_count(int q) { return q * q - q; }
inline int unitary_param_count(int q) { return q * q; }

namespace detail {

// In-place right-multiplication U <- U * exp(i P_n phi).
inline void apply_column_phase(cmat& u, int n, double phi) {
  u.col(n) *= std::complex<double>(std::cos(phi), std::sin(phi));
}

// In-place right-multiplication U <- U * exp(i s_{m,n} theta); the factor
// acts on the (m, n) plane as [[cos, sin], [-sin, cos]].
inline void apply_plane_rotation(cmat& u, int m, int n, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const cvec um = u.col(m);
  u.col(m) = c * um - s * u.col(n);
  u.col(n) = s * um + c * u.col(n);
}

}  // namespace detail

// Basis unitary from q^2 - q angles in canonical packing.
inline cmat basis_from_params(int q, const std::vector<double>& angles) {
  if (q < 1) throw input_error("basis_from_params: dimension must be >= 1");
  if (static_cast<int>(angles.size()) != basis_param_count(q))
    throw input_error("basis_from_params: expected q^2 - q angles");
  cmat u = cmat::Identity(q, q);
  size_t k = 0;
  for (int m = 0; m < q - 1; ++m)
    for (int n = m + 1; n < q; ++n) {
      detail::apply_column_phase(u, n, angles[k++]);
      detail::apply_plane_rotation(u, m, n, angles[k++]);
    }
  return u;
}

// Full unitary from q^2 angles (basis packing plus q diagonal phases).
inline cmat unitary_from_params(int q, const std::vector<double>& angles) {
  if (q < 1) throw input_error("unitary_from_params: dimension must be >= 1");
  if (static_cast<int>(angles.size()) != unitary_param_count(q))
    throw input_error("unitary_from_params: expected q^2 angles");
  std::vector<double> head(angles.begin(), angles.begin() + basis_param_count(q));
  cmat u = basis_from_params(q, head);
  for (int l = 0; l < q; ++l)
    detail::apply_column_phase(u, l, angles[static_cast<size_t>(basis_param_count(q) + l)]);
  return u;
}

// Projective measurement with one outcome per decision letter: basis columns
// are grouped by the partition digit assigned to them.  Decisions that
// receive no column get the zero projector (a degenerate assignment).
inline std::vector<cmat> measurement_from_params(int q, int decisions,
                                                 const std::vector<double>& angles,
                                                 const std::vector<int>& partition) {
  if (decisions < 1)
    throw input_error("measurement_from_params: need at least one decision");
  if (static_cast<int>(partition.size()) != q)
    throw input_error("measurement_from_params: partition must assign every column");
  for (int digit : partition)
    if (digit < 0 || digit >= decisions)
      throw input_error("measurement_from_params: partition digit out of range");
  const cmat u = basis_from_params(q, angles);
  std::vector<cmat> projectors(static_cast<size_t>(decisions), cmat::Zero(q, q));
  for (int l = 0; l < q; ++l)
    projectors[static_cast<size_t>(partition[static_cast<size_t>(l)])] +=
        u.col(l) * u.col(l).adjoint();
  return projectors;
}

}  // namespace tacit

#pragma once

// Quantum strategies for tacit coordination: each party i holds a
// q_i-dimensional system and measures a projective measurement chosen by its
// observation; the joint state is shared in advance.  For fixed measurements
// the expected utility is linear in the state, with Bell operator
//
//   H = sum_o p_O(o) sum_d u_o^d  (x)_i P_i^(d_i | o_i),
//
// so the optimal state is the top eigenvector of H and the optimal value its
// largest eigenvalue.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tacit/errors.hpp"
#include "tacit/parameterization.hpp"
#include "tacit/problem.hpp"

namespace tacit {

inline cmat kron(const cmat& a, const cmat& b) {
  cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline cvec kron(const cvec& a, const cvec& b) {
  cvec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// measurements[party][local obs] is a list of projectors, one per local
// decision letter (zero projectors encode degenerate assignments).
using MeasurementSet = std::vector<std::vector<std::vector<cmat>>>;

struct QuantumStrategy {
  std::vector<int> dims;
  MeasurementSet measurements;
  cvec state;  // size prod(dims), or empty when only measurements matter

  [[nodiscard]] std::int64_t total_dim() const {
    std::int64_t d = 1;
    for (int q : dims) d *= q;
    return d;
  }

  void validate(const TcProblem& problem, double tol = 1e-9) const {
    const int n = problem.parties();
    if (static_cast<int>(dims.size()) != n ||
        static_cast<int>(measurements.size()) != n)
      throw input_error("QuantumStrategy: wrong party count");
    for (int i = 0; i < n; ++i) {
      const int q = dims[static_cast<size_t>(i)];
      if (q < problem.dec_shape().size(i))
        throw input_error("QuantumStrategy: local dimension below decision count");
      const auto& per_obs = measurements[static_cast<size_t>(i)];
      if (static_cast<int>(per_obs.size()) != problem.obs_shape().size(i))
        throw input_error("QuantumStrategy: wrong observation count");
      for (const auto& projectors : per_obs) {
        if (static_cast<int>(projectors.size()) != problem.dec_shape().size(i))
          throw input_error("QuantumStrategy: one projector per decision required");
        cmat sum = cmat::Zero(q, q);
        for (const cmat& p : projectors) {
          if (p.rows() != q || p.cols() != q)
            throw input_error("QuantumStrategy: projector dimension mismatch");
          if ((p - p.adjoint()).cwiseAbs().maxCoeff() > tol)
            throw input_error("QuantumStrategy: projector not Hermitian");
          if ((p * p - p).cwiseAbs().maxCoeff() > tol)
            throw input_error("QuantumStrategy: projector not idempotent");
          sum += p;
        }
        if ((sum - cmat::Identity(q, q)).cwiseAbs().maxCoeff() > tol)
          throw input_error("QuantumStrategy: projectors must sum to identity");
      }
    }
    if (state.size() != 0) {
      if (state.size() != total_dim())
        throw input_error("QuantumStrategy: state dimension mismatch");
      if (std::abs(state.norm() - 1.0) > 1e-10)
        throw input_error("QuantumStrategy: state must be normalized");
    }
  }
};

inline cmat bell_operator(const TcProblem& problem, const MeasurementSet& measurements) {
  const int n = problem.parties();
  if (static_cast<int>(measurements.size()) != n)
    throw input_error("bell_operator: wrong party count");
  std::int64_t dim = 1;
  for (const auto& per_obs : measurements) {
    if (per_obs.empty() || per_obs[0].empty())
      throw input_error("bell_operator: empty measurement set");
    dim *= per_obs[0][0].rows();
  }
  cmat h = cmat::Zero(dim, dim);
  const std::vector<double> w = problem.weighted_utility();
  const std::int64_t ndec = problem.dec_shape().total();
  for (std::int64_t o = 0; o < problem.obs_shape().total(); ++o) {
    const auto lo = problem.obs_shape().unflatten(o);
    for (std::int64_t d = 0; d < ndec; ++d) {
      const double weight = w[static_cast<size_t>(o * ndec + d)];
      if (weight == 0.0) continue;
      const auto ld = problem.dec_shape().unflatten(d);
      cmat term =
          measurements[0][static_cast<size_t>(lo[0])][static_cast<size_t>(ld[0])];
      for (int i = 1; i < n; ++i)
        term = kron(term, measurements[static_cast<size_t>(i)]
                             [static_cast<size_t>(lo[static_cast<size_t>(i)])]
                             [static_cast<size_t>(ld[static_cast<size_t>(i)])]);
      h += weight * term;
    }
  }
  return h;
}

struct EigenPair {
  double value = 0.0;
  cvec vector;
  double spectral_gap = 0.0;  // top eigenvalue minus runner-up (0 for 1x1)
};

inline EigenPair largest_eigenvalue(const cmat& h) {
  if (h.rows() != h.cols()) throw input_error("largest_eigenvalue: matrix not square");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw input_error("largest_eigenvalue: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<cmat> solver((h + h.adjoint()) * 0.5);
  if (solver.info() != Eigen::Success)
    throw numerical_error("largest_eigenvalue: eigensolver failed");
  const Eigen::Index last = h.rows() - 1;
  EigenPair out;
  out.value = solver.eigenvalues()(last);
  out.vector = solver.eigenvectors().col(last);
  out.spectral_gap =
      (last > 0) ? out.value - solver.eigenvalues()(last - 1) : 0.0;
  if ((h * out.vector - out.value * out.vector).norm() > 1e-8)
    throw numerical_error("largest_eigenvalue: residual too large");
  return out;
}

// Born-rule behavior p(d|o) = <psi| (x)_i P_i^(d_i|o_i) |psi>.
inline Behavior behavior_of(const TcProblem& problem, const QuantumStrategy& strategy) {
  strategy.validate(problem);
  if (strategy.state.size() == 0)
    throw input_error("behavior_of: strategy carries no state");
  const int n = problem.parties();
  const std::int64_t ndec = problem.dec_shape().total();
  std::vector<double> p(static_cast<size_t>(problem.obs_shape().total() * ndec));
  for (std::int64_t o = 0; o < problem.obs_shape().total(); ++o) {
    const auto lo = problem.obs_shape().unflatten(o);
    for (std::int64_t d = 0; d < ndec; ++d) {
      const auto ld = problem.dec_shape().unflatten(d);
      cmat term = strategy.measurements[0][static_cast<size_t>(lo[0])]
                                       [static_cast<size_t>(ld[0])];
      for (int i = 1; i < n; ++i)
        term = kron(term, strategy.measurements[static_cast<size_t>(i)]
                              [static_cast<size_t>(lo[static_cast<size_t>(i)])]
                              [static_cast<size_t>(ld[static_cast<size_t>(i)])]);
      const double prob =
          std::real(std::complex<double>(strategy.state.adjoint() * term * strategy.state));
      p[static_cast<size_t>(o * ndec + d)] = std::max(prob, 0.0);
    }
  }
  return Behavior(problem.obs_shape(), problem.dec_shape(), std::move(p));
}

// Expected utility of a quantum strategy (state required).
inline double expected_utility(const TcProblem& problem, const QuantumStrategy& strategy) {
  return expected_utility(problem, behavior_of(problem, strategy));
}

// ---------------------------------------------------------------------------
// Schmidt decomposition of a bipartite pure state via SVD of its coefficient
// matrix: psi[a * q_b + b] = M(a, b) = sum_k s_k A(a, k) B(b, k).
// ---------------------------------------------------------------------------
struct SchmidtDecomposition {
  std::vector<double> coefficients;  // nonnegative, descending
  cmat basis_a;                      // columns are the local Schmidt vectors
  cmat basis_b;
};

inline SchmidtDecomposition schmidt_decompose(const cvec& state, int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1 || state.size() != static_cast<Eigen::Index>(dim_a) * dim_b)
    throw input_error("schmidt_decompose: state does not factor into the given dimensions");
  cmat m(dim_a, dim_b);
  for (int a = 0; a < dim_a; ++a)
    for (int b = 0; b < dim_b; ++b) m(a, b) = state(a * dim_b + b);
  Eigen::JacobiSVD<cmat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SchmidtDecomposition out;
  const Eigen::Index k = std::min(dim_a, dim_b);
  out.coefficients.assign(svd.singularValues().data(),
                          svd.singularValues().data() + k);
  out.basis_a = svd.matrixU();
  out.basis_b = svd.matrixV().conjugate();
  // Reconstruction guard: sum_k s_k a_k (x) b_k must reproduce the state.
  cvec rebuilt = cvec::Zero(state.size());
  for (Eigen::Index i = 0; i < k; ++i)
    rebuilt += out.coefficients[static_cast<size_t>(i)] *
               kron(cvec(out.basis_a.col(i)), cvec(out.basis_b.col(i)));
  if ((rebuilt - state).norm() > 1e-9)
    throw numerical_error("schmidt_decompose: reconstruction failed");
  return out;
}

}  // namespace tacit

#pragma once

// Covariance-matrix-adaptation evolution strategy ((mu/mu_w, lambda)-CMA-ES)
// for mixed continuous/discrete search spaces, maximizing a black-box
// objective.  Continuous coordinates are wrapped into their range before
// evaluation; discrete coordinates are rounded to the integer lattice and a
// margin correction keeps the probability of flipping each discrete value
// bounded away from zero so they never freeze prematurely.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tacit/errors.hpp"

namespace tacit {

struct VariableSpec {
  double lo = 0.0;
  double hi = 1.0;     // continuous range, or radix - 1 for discrete
  bool discrete = false;

  static VariableSpec continuous(double lo, double hi) { return {lo, hi, false}; }
  static VariableSpec integer(int radix) {
    return {0.0, static_cast<double>(radix - 1), true};
  }
};

struct CmaesOptions {
  std::uint64_t seed = 2024;
  int restarts = 5;
  int max_iterations = 400;             // per restart
  std::int64_t max_evaluations = 5'000'000;  // across all restarts
  double initial_sigma_fraction = 0.25;
  double tol_fun = 1e-12;
  int stagnation_iterations = 60;
};

struct CmaesResult {
  std::vector<double> x;  // canonical: wrapped / rounded representative
  double value = 0.0;
  std::int64_t evaluations = 0;
  int iterations = 0;
  int restarts_run = 0;
  bool budget_exhausted = false;
};

namespace detail {

// Acklam's rational approximation of the standard normal quantile.
inline double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425, p_high = 1.0 - p_low;
  double q, r;
  if (p <= 0.0) return -1e12;
  if (p >= 1.0) return 1e12;
  if (p < p_low) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= p_high) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Wrap a continuous coordinate into [lo, hi) by the range period; round and
// clamp a discrete coordinate to its lattice.
inline double canonical_coordinate(double x, const VariableSpec& v) {
  if (v.discrete) {
    const double r = std::round(x);
    return std::clamp(r, v.lo, v.hi);
  }
  const double span = v.hi - v.lo;
  if (span <= 0.0) return v.lo;
  double y = std::fmod(x - v.lo, span);
  if (y < 0.0) y += span;
  return v.lo + y;
}

}  // namespace detail

inline std::vector<double> canonical_point(const std::vector<double>& x,
                                           const std::vector<VariableSpec>& vars) {
  std::vector<double> out(x.size());
  for (size_t j = 0; j < x.size(); ++j)
    out[j] = detail::canonical_coordinate(x[j], vars[j]);
  return out;
}

template <typename F>
CmaesResult cmaes_maximize(F&& f, const std::vector<VariableSpec>& vars,
                           const CmaesOptions& options = {}) {
  const int dim = static_cast<int>(vars.size());
  if (dim == 0) throw input_error("cmaes_maximize: empty search space");
  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;

  const int lambda = 4 + static_cast<int>(std::floor(3.0 * std::log(dim)));
  const int mu = lambda / 2;
  Vec weights(mu);
  for (int i = 0; i < mu; ++i)
    weights(i) = std::log(mu + 0.5) - std::log(static_cast<double>(i + 1));
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double c_sigma = (mu_eff + 2.0) / (dim + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (dim + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / dim) / (dim + 4.0 + 2.0 * mu_eff / dim);
  const double c_1 = 2.0 / ((dim + 1.3) * (dim + 1.3) + mu_eff);
  const double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                              ((dim + 2.0) * (dim + 2.0) + mu_eff));
  const double chi_n =
      std::sqrt(static_cast<double>(dim)) *
      (1.0 - 1.0 / (4.0 * dim) + 1.0 / (21.0 * dim * dim));

  // Flip probability floor for discrete coordinates.
  const double alpha_margin = 1.0 / (2.0 * dim * lambda);
  const double z_margin = detail::normal_quantile(1.0 - alpha_margin);

  // Per-coordinate sampling scale: 1/4 of the range (at least 1/2 lattice
  // spacing for discrete coordinates so flips stay reachable).
  Vec scale(dim);
  for (int j = 0; j < dim; ++j) {
    const double span = vars[static_cast<size_t>(j)].hi - vars[static_cast<size_t>(j)].lo;
    double s = options.initial_sigma_fraction * span;
    if (vars[static_cast<size_t>(j)].discrete) s = std::max(s, 0.5);
    scale(j) = (s > 0.0) ? s : 1e-3;
  }

  std::mt19937_64 master(options.seed);
  CmaesResult best;
  bool have_best = false;

  for (int restart = 0; restart < options.restarts; ++restart) {
    if (best.evaluations >= options.max_evaluations) {
      best.budget_exhausted = true;
      break;
    }
    std::mt19937_64 rng(master());
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Vec mean(dim);
    for (int j = 0; j < dim; ++j) {
      const auto& v = vars[static_cast<size_t>(j)];
      if (v.discrete) {
        const int radix = static_cast<int>(v.hi) + 1;
        mean(j) = static_cast<double>(std::uniform_int_distribution<int>(0, radix - 1)(rng));
      } else {
        mean(j) = v.lo + unit(rng) * (v.hi - v.lo);
      }
    }
    double sigma = 1.0;
    Mat cov = scale.array().square().matrix().asDiagonal();
    Vec path_sigma = Vec::Zero(dim), path_c = Vec::Zero(dim);
    Mat eig_b = Mat::Identity(dim, dim);
    Vec eig_d = scale;

    double restart_best = -1e300;
    int since_improvement = 0;

    for (int it = 0; it < options.max_iterations; ++it) {
      if (best.evaluations + lambda > options.max_evaluations) {
        best.budget_exhausted = true;
        break;
      }
      // The search spaces here are tiny, so refresh the decomposition every
      // iteration.
      {
        Eigen::SelfAdjointEigenSolver<Mat> es(cov);
        if (es.info() != Eigen::Success)
          throw numerical_error("cmaes_maximize: covariance eigensolver failed");
        eig_b = es.eigenvectors();
        eig_d = es.eigenvalues().cwiseMax(1e-30).cwiseSqrt();
      }

      std::vector<Vec> z(static_cast<size_t>(lambda)), x(static_cast<size_t>(lambda));
      std::vector<double> fitness(static_cast<size_t>(lambda));
      std::vector<int> order(static_cast<size_t>(lambda));
      for (int k = 0; k < lambda; ++k) {
        Vec zk(dim);
        for (int j = 0; j < dim; ++j) zk(j) = gauss(rng);
        z[static_cast<size_t>(k)] = zk;
        x[static_cast<size_t>(k)] = mean + sigma * (eig_b * (eig_d.asDiagonal() * zk));
        std::vector<double> raw(x[static_cast<size_t>(k)].data(),
                                x[static_cast<size_t>(k)].data() + dim);
        const std::vector<double> point = canonical_point(raw, vars);
        fitness[static_cast<size_t>(k)] = f(point);
        ++best.evaluations;
        order[static_cast<size_t>(k)] = k;
        if (!have_best || fitness[static_cast<size_t>(k)] > best.value) {
          best.value = fitness[static_cast<size_t>(k)];
          best.x = point;
          have_best = true;
        }
      }
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return fitness[static_cast<size_t>(a)] > fitness[static_cast<size_t>(b)];
      });

      const Vec old_mean = mean;
      Vec z_mean = Vec::Zero(dim);
      mean = Vec::Zero(dim);
      for (int i = 0; i < mu; ++i) {
        mean += weights(i) * x[static_cast<size_t>(order[static_cast<size_t>(i)])];
        z_mean += weights(i) * z[static_cast<size_t>(order[static_cast<size_t>(i)])];
      }

      path_sigma = (1.0 - c_sigma) * path_sigma +
                   std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * (eig_b * z_mean);
      const double ps_norm = path_sigma.norm();
      const bool hsig =
          ps_norm / std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (it + 1))) / chi_n <
          1.4 + 2.0 / (dim + 1.0);
      path_c *= 1.0 - c_c;
      if (hsig)
        path_c += std::sqrt(c_c * (2.0 - c_c) * mu_eff) * (mean - old_mean) / sigma;

      Mat rank_mu = Mat::Zero(dim, dim);
      for (int i = 0; i < mu; ++i) {
        const Vec y =
            (x[static_cast<size_t>(order[static_cast<size_t>(i)])] - old_mean) / sigma;
        rank_mu += weights(i) * y * y.transpose();
      }
      cov = (1.0 - c_1 - c_mu) * cov + c_1 * (path_c * path_c.transpose() +
                                              (hsig ? 0.0 : c_c * (2.0 - c_c)) * cov) +
            c_mu * rank_mu;
      sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));

      // Margin correction: keep every discrete coordinate within z_margin
      // standard deviations of its nearest rounding boundary, so the flip
      // probability never drops below alpha_margin.
      for (int j = 0; j < dim; ++j) {
        const auto& v = vars[static_cast<size_t>(j)];
        if (!v.discrete) continue;
        const double sd = sigma * std::sqrt(std::max(cov(j, j), 1e-30));
        const double current = std::clamp(std::round(mean(j)), v.lo, v.hi);
        double nearest = 0.0;
        bool has_boundary = false;
        if (current >= v.lo + 1.0) {  // a lower neighbor value exists
          nearest = current - 0.5;
          has_boundary = true;
        }
        if (current <= v.hi - 1.0) {  // an upper neighbor value exists
          const double upper = current + 0.5;
          if (!has_boundary || std::abs(mean(j) - upper) < std::abs(mean(j) - nearest))
            nearest = upper;
          has_boundary = true;
        }
        if (!has_boundary) continue;  // radix 1: nothing to flip to
        const double dist = std::abs(mean(j) - nearest);
        const double limit = sd * z_margin;
        if (dist > limit)
          mean(j) = nearest + ((mean(j) > nearest) ? limit : -limit);
      }

      const double iter_best = fitness[static_cast<size_t>(order[0])];
      if (iter_best > restart_best + options.tol_fun) {
        restart_best = iter_best;
        since_improvement = 0;
      } else if (++since_improvement >= options.stagnation_iterations) {
        break;
      }
      if (sigma * eig_d.maxCoeff() < 1e-13) break;
      best.iterations = std::max(best.iterations, it + 1);
    }
    best.restarts_run = restart + 1;
    if (best.budget_exhausted) break;
  }
  return best;
}

}  // namespace tacit

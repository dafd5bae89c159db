#pragma once

// Derivative-free local refinement (Nelder-Mead simplex, maximization).
// Used to polish grid-search candidates; convergence is declared when the
// simplex collapses below a parameter tolerance.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace tacit {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  std::int64_t evaluations = 0;
  bool converged = false;
};

template <typename F>
NelderMeadResult nelder_mead_maximize(F&& f, const std::vector<double>& x0,
                                      const std::vector<double>& initial_step,
                                      double param_tol = 1e-10,
                                      int max_iterations = 0) {
  const int n = static_cast<int>(x0.size());
  if (max_iterations == 0) max_iterations = 400 * std::max(n, 1);
  NelderMeadResult result;
  if (n == 0) {
    result.x = x0;
    result.value = f(x0);
    result.evaluations = 1;
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> simplex(static_cast<size_t>(n) + 1, x0);
  for (int j = 0; j < n; ++j)
    simplex[static_cast<size_t>(j) + 1][static_cast<size_t>(j)] +=
        initial_step[static_cast<size_t>(j)];
  std::vector<double> value(static_cast<size_t>(n) + 1);
  for (size_t v = 0; v < simplex.size(); ++v) {
    value[v] = f(simplex[v]);
    ++result.evaluations;
  }

  auto order = [&]() {
    std::vector<size_t> idx(simplex.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return value[a] > value[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> v2;
    for (size_t i : idx) {
      s2.push_back(simplex[i]);
      v2.push_back(value[i]);
    }
    simplex.swap(s2);
    value.swap(v2);
  };

  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  for (int it = 0; it < max_iterations; ++it) {
    order();
    // Simplex diameter relative to the best vertex.
    double diameter = 0.0;
    for (size_t v = 1; v < simplex.size(); ++v)
      for (int j = 0; j < n; ++j)
        diameter = std::max(diameter, std::abs(simplex[v][static_cast<size_t>(j)] -
                                               simplex[0][static_cast<size_t>(j)]));
    if (diameter <= param_tol) {
      result.converged = true;
      result.iterations = it;
      break;
    }

    std::vector<double> centroid(static_cast<size_t>(n), 0.0);
    for (size_t v = 0; v + 1 < simplex.size(); ++v)
      for (int j = 0; j < n; ++j)
        centroid[static_cast<size_t>(j)] += simplex[v][static_cast<size_t>(j)] / n;

    auto blend = [&](double t) {
      std::vector<double> x(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j)
        x[static_cast<size_t>(j)] =
            centroid[static_cast<size_t>(j)] +
            t * (centroid[static_cast<size_t>(j)] -
                 simplex.back()[static_cast<size_t>(j)]);
      return x;
    };

    const std::vector<double> reflected = blend(kReflect);
    const double f_r = f(reflected);
    ++result.evaluations;
    if (f_r > value[0]) {
      const std::vector<double> expanded = blend(kExpand);
      const double f_e = f(expanded);
      ++result.evaluations;
      simplex.back() = (f_e > f_r) ? expanded : reflected;
      value.back() = std::max(f_e, f_r);
    } else if (f_r > value[value.size() - 2]) {
      simplex.back() = reflected;
      value.back() = f_r;
    } else {
      const std::vector<double> contracted = blend((f_r > value.back()) ? kContract
                                                                        : -kContract);
      const double f_c = f(contracted);
      ++result.evaluations;
      if (f_c > std::max(f_r, value.back())) {
        simplex.back() = contracted;
        value.back() = f_c;
      } else {
        for (size_t v = 1; v < simplex.size(); ++v) {
          for (int j = 0; j < n; ++j)
            simplex[v][static_cast<size_t>(j)] =
                simplex[0][static_cast<size_t>(j)] +
                kShrink * (simplex[v][static_cast<size_t>(j)] -
                           simplex[0][static_cast<size_t>(j)]);
          value[v] = f(simplex[v]);
          ++result.evaluations;
        }
      }
    }
    result.iterations = it + 1;
  }
  order();
  result.x = simplex[0];
  result.value = value[0];
  return result;
}

}  // namespace tacit

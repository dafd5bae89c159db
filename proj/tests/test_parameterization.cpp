#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "tacit/errors.hpp"
#include "tacit/parameterization.hpp"

using namespace tacit;

namespace {

std::vector<double> random_angles(int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 2.0 * 3.14159265358979323846);
  std::vector<double> angles(static_cast<size_t>(count));
  for (auto& a : angles) a = dist(rng);
  return angles;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(basis_param_count(1) == 0);
  CHECK(basis_param_count(2) == 2);
  CHECK(basis_param_count(3) == 6);
  CHECK(basis_param_count(4) == 12);
  CHECK(unitary_param_count(2) == 4);
  CHECK(unitary_param_count(3) == 9);
  CHECK(unitary_param_count(4) == 16);
}

TEST_CASE("qubit basis matches its closed form") {
  // Packing [phase, rotation] yields [[c, s], [-e^{i phi} s, e^{i phi} c]].
  std::mt19937_64 rng(20240824);
  std::uniform_real_distribution<double> dist(0.0, 6.28);
  for (int trial = 0; trial < 20; ++trial) {
    const double phi = dist(rng), theta = dist(rng);
    const cmat u = basis_from_params(2, {phi, theta});
    const std::complex<double> e(std::cos(phi), std::sin(phi));
    CHECK(std::abs(u(0, 0) - std::cos(theta)) < 1e-14);
    CHECK(std::abs(u(0, 1) - std::sin(theta)) < 1e-14);
    CHECK(std::abs(u(1, 0) + e * std::sin(theta)) < 1e-14);
    CHECK(std::abs(u(1, 1) - e * std::cos(theta)) < 1e-14);
  }
}

TEST_CASE("basis unitaries are unitary in dimensions 2 through 4") {
  std::mt19937_64 rng(20240825);
  for (int q = 2; q <= 4; ++q) {
    for (int trial = 0; trial < 10; ++trial) {
      const cmat u = basis_from_params(q, random_angles(basis_param_count(q), rng));
      CHECK((u.adjoint() * u - cmat::Identity(q, q)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(std::abs(u.determinant()) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("full unitaries append diagonal phases") {
  std::mt19937_64 rng(20240826);
  for (int q = 2; q <= 3; ++q) {
    const auto head = random_angles(basis_param_count(q), rng);
    const auto tail = random_angles(q, rng);
    std::vector<double> all = head;
    all.insert(all.end(), tail.begin(), tail.end());
    const cmat u = unitary_from_params(q, all);
    CHECK((u.adjoint() * u - cmat::Identity(q, q)).cwiseAbs().maxCoeff() < 1e-12);
    // Zero diagonal phases reduce to the bare basis.
    std::vector<double> zeros = head;
    zeros.insert(zeros.end(), static_cast<size_t>(q), 0.0);
    CHECK((unitary_from_params(q, zeros) - basis_from_params(q, head))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    // Projectors built from columns ignore the diagonal phases.
    const cmat base = basis_from_params(q, head);
    for (int l = 0; l < q; ++l) {
      const cmat pu = u.col(l) * u.col(l).adjoint();
      const cmat pb = base.col(l) * base.col(l).adjoint();
      CHECK((pu - pb).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("measurements are projective and complete") {
  std::mt19937_64 rng(20240827);
  for (int q = 2; q <= 4; ++q) {
    const auto angles = random_angles(basis_param_count(q), rng);
    std::vector<int> partition(static_cast<size_t>(q));
    for (int l = 0; l < q; ++l) partition[static_cast<size_t>(l)] = l % 2;
    const auto ops = measurement_from_params(q, 2, angles, partition);
    REQUIRE(ops.size() == 2);
    cmat sum = cmat::Zero(q, q);
    for (const auto& p : ops) {
      CHECK((p - p.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
      sum += p;
    }
    CHECK((sum - cmat::Identity(q, q)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ops[0] * ops[1]).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("partition digits group columns and allow degenerate assignments") {
  std::mt19937_64 rng(20240828);
  const auto angles = random_angles(basis_param_count(3), rng);
  const auto ops = measurement_from_params(3, 2, angles, {0, 1, 0});
  CHECK(std::lround(ops[0].trace().real()) == 2);
  CHECK(std::lround(ops[1].trace().real()) == 1);

  const auto trivial = measurement_from_params(2, 2, {0.0, 0.0}, {0, 0});
  CHECK((trivial[0] - cmat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(trivial[1].cwiseAbs().maxCoeff() == 0.0);

  // Unused decisions keep the zero projector.
  const auto sparse = measurement_from_params(2, 3, {0.0, 0.3}, {0, 2});
  CHECK(sparse[1].cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::lround(sparse[0].trace().real()) == 1);
  CHECK(std::lround(sparse[2].trace().real()) == 1);
}

TEST_CASE("rotation angle encodes the standard observable family") {
  // With zero phase, the projector difference P0 - P1 at rotation alpha equals
  // cos(2 alpha) Z - sin(2 alpha) X.
  cmat z = cmat::Zero(2, 2), x = cmat::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  for (double alpha : {0.0, 0.2, 0.7853981633974483, 1.1, 1.5707963267948966}) {
    const auto ops = measurement_from_params(2, 2, {0.0, alpha}, {0, 1});
    const cmat observable = ops[0] - ops[1];
    const cmat expected = std::cos(2.0 * alpha) * z - std::sin(2.0 * alpha) * x;
    CHECK((observable - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("parameterization input validation") {
  CHECK_THROWS_AS((void)basis_from_params(0, {}), input_error);
  CHECK_THROWS_AS((void)basis_from_params(2, {0.1}), input_error);
  CHECK_THROWS_AS((void)unitary_from_params(2, {0.1, 0.2, 0.3}), input_error);
  CHECK_THROWS_AS((void)measurement_from_params(2, 0, {0.0, 0.0}, {0, 0}), input_error);
  CHECK_THROWS_AS((void)measurement_from_params(2, 2, {0.0, 0.0}, {0}), input_error);
  CHECK_THROWS_AS((void)measurement_from_params(2, 2, {0.0, 0.0}, {0, 2}), input_error);
  CHECK_THROWS_AS((void)measurement_from_params(2, 2, {0.0, 0.0}, {0, -1}), input_error);
}

#pragma once

// Core types for tacit-coordination problems: n parties each privately
// observe a letter o_i drawn from a joint input distribution and must commit
// to a decision d_i without communicating.  A problem is the data
// (alphabets, input distribution, utility array); strategies map
// observations to decisions and are scored by expected utility.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "tacit/errors.hpp"

namespace tacit {

// ---------------------------------------------------------------------------
// Mixed-radix indexing over per-party alphabets.
//
// Joint indices are flattened row-major: party 0 is the slowest digit, the
// last party the fastest.  All joint observation/decision arrays in this
// library use this order.
// ---------------------------------------------------------------------------
class JointShape {
 public:
  JointShape() = default;

  explicit JointShape(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    total_ = 1;
    for (int s : sizes_) {
      if (s < 1) throw input_error("JointShape: alphabet sizes must be >= 1");
      if (total_ > std::numeric_limits<std::int64_t>::max() / s)
        throw input_error("JointShape: joint alphabet overflows 64-bit index");
      total_ *= s;
    }
  }

  [[nodiscard]] int arity() const { return static_cast<int>(sizes_.size()); }
  [[nodiscard]] int size(int i) const { return sizes_.at(static_cast<size_t>(i)); }
  [[nodiscard]] const std::vector<int>& sizes() const { return sizes_; }
  [[nodiscard]] std::int64_t total() const { return total_; }

  [[nodiscard]] std::int64_t flatten(const std::vector<int>& idx) const {
    if (idx.size() != sizes_.size())
      throw input_error("JointShape::flatten: arity mismatch");
    std::int64_t flat = 0;
    for (size_t i = 0; i < sizes_.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= sizes_[i])
        throw input_error("JointShape::flatten: index out of range");
      flat = flat * sizes_[i] + idx[i];
    }
    return flat;
  }

  [[nodiscard]] std::vector<int> unflatten(std::int64_t flat) const {
    if (flat < 0 || flat >= total_)
      throw input_error("JointShape::unflatten: index out of range");
    std::vector<int> idx(sizes_.size());
    for (size_t i = sizes_.size(); i-- > 0;) {
      idx[i] = static_cast<int>(flat % sizes_[i]);
      flat /= sizes_[i];
    }
    return idx;
  }

  // Odometer increment; returns false after the last index wraps to zero.
  bool next(std::vector<int>& idx) const {
    for (size_t i = sizes_.size(); i-- > 0;) {
      if (++idx[i] < sizes_[i]) return true;
      idx[i] = 0;
    }
    return false;
  }

 private:
  std::vector<int> sizes_;
  std::int64_t total_ = 1;
};

// ---------------------------------------------------------------------------
// TcProblem -- immutable problem instance.
//
// utility is stored flat with the joint observation index outer and the
// joint decision index inner: utility[o * |D| + d].
// ---------------------------------------------------------------------------
class TcProblem {
 public:
  TcProblem(std::vector<std::vector<std::string>> observation_labels,
            std::vector<std::vector<std::string>> decision_labels,
            std::vector<double> input_distribution,
            std::vector<double> utility)
      : obs_labels_(std::move(observation_labels)),
        dec_labels_(std::move(decision_labels)),
        input_(std::move(input_distribution)),
        utility_(std::move(utility)) {
    if (obs_labels_.size() < 2)
      throw input_error("TcProblem: need at least two parties");
    if (dec_labels_.size() != obs_labels_.size())
      throw input_error("TcProblem: observation/decision party counts differ");
    obs_shape_ = JointShape(alphabet_sizes(obs_labels_, "observation"));
    dec_shape_ = JointShape(alphabet_sizes(dec_labels_, "decision"));
    if (static_cast<std::int64_t>(input_.size()) != obs_shape_.total())
      throw input_error("TcProblem: input distribution has wrong length");
    if (static_cast<std::int64_t>(utility_.size()) !=
        obs_shape_.total() * dec_shape_.total())
      throw input_error("TcProblem: utility array has wrong length");
    double sum = 0.0;
    for (double p : input_) {
      if (!std::isfinite(p) || p < -1e-12)
        throw input_error("TcProblem: input distribution entries must be nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw input_error("TcProblem: input distribution must sum to 1");
    for (double u : utility_)
      if (!std::isfinite(u))
        throw input_error("TcProblem: utility entries must be finite");
  }

  [[nodiscard]] int parties() const { return static_cast<int>(obs_labels_.size()); }
  [[nodiscard]] const JointShape& obs_shape() const { return obs_shape_; }
  [[nodiscard]] const JointShape& dec_shape() const { return dec_shape_; }
  [[nodiscard]] const std::vector<std::vector<std::string>>& observation_labels() const {
    return obs_labels_;
  }
  [[nodiscard]] const std::vector<std::vector<std::string>>& decision_labels() const {
    return dec_labels_;
  }
  [[nodiscard]] const std::vector<double>& input_distribution() const { return input_; }
  [[nodiscard]] const std::vector<double>& utility_array() const { return utility_; }

  [[nodiscard]] double input_probability(std::int64_t o) const {
    return input_.at(static_cast<size_t>(o));
  }
  [[nodiscard]] double utility(std::int64_t o, std::int64_t d) const {
    return utility_[static_cast<size_t>(o * dec_shape_.total() + d)];
  }

  // Entry-wise product w_o^d = p_O(o) * u_o^d, same layout as utility.
  [[nodiscard]] std::vector<double> weighted_utility() const {
    std::vector<double> w(utility_.size());
    const std::int64_t nd = dec_shape_.total();
    for (std::int64_t o = 0; o < obs_shape_.total(); ++o)
      for (std::int64_t d = 0; d < nd; ++d)
        w[static_cast<size_t>(o * nd + d)] = input_[static_cast<size_t>(o)] *
                                             utility_[static_cast<size_t>(o * nd + d)];
    return w;
  }

 private:
  static std::vector<int> alphabet_sizes(
      const std::vector<std::vector<std::string>>& labels, const char* kind) {
    std::vector<int> sizes;
    sizes.reserve(labels.size());
    for (const auto& alphabet : labels) {
      if (alphabet.empty())
        throw input_error(std::string("TcProblem: empty ") + kind + " alphabet");
      for (size_t a = 0; a < alphabet.size(); ++a)
        for (size_t b = a + 1; b < alphabet.size(); ++b)
          if (alphabet[a] == alphabet[b])
            throw input_error(std::string("TcProblem: duplicate ") + kind +
                              " label '" + alphabet[a] + "'");
      sizes.push_back(static_cast<int>(alphabet.size()));
    }
    return sizes;
  }

  std::vector<std::vector<std::string>> obs_labels_;
  std::vector<std::vector<std::string>> dec_labels_;
  std::vector<double> input_;
  std::vector<double> utility_;
  JointShape obs_shape_;
  JointShape dec_shape_;
};

// ---------------------------------------------------------------------------
// DeterministicStrategy -- per party, a function from local observation
// index to local decision index.
// ---------------------------------------------------------------------------
struct DeterministicStrategy {
  std::vector<std::vector<int>> decisions;  // [party][local obs] -> local dec

  void validate(const TcProblem& problem) const {
    if (static_cast<int>(decisions.size()) != problem.parties())
      throw input_error("DeterministicStrategy: wrong party count");
    for (int i = 0; i < problem.parties(); ++i) {
      if (static_cast<int>(decisions[static_cast<size_t>(i)].size()) !=
          problem.obs_shape().size(i))
        throw input_error("DeterministicStrategy: wrong observation count");
      for (int d : decisions[static_cast<size_t>(i)])
        if (d < 0 || d >= problem.dec_shape().size(i))
          throw input_error("DeterministicStrategy: decision out of range");
    }
  }

  // Joint decision index chosen on joint observation o.
  [[nodiscard]] std::int64_t joint_decision(const TcProblem& problem,
                                            std::int64_t o) const {
    const auto local = problem.obs_shape().unflatten(o);
    std::int64_t d = 0;
    for (int i = 0; i < problem.parties(); ++i)
      d = d * problem.dec_shape().size(i) +
          decisions[static_cast<size_t>(i)][static_cast<size_t>(local[static_cast<size_t>(i)])];
    return d;
  }

  // Canonical enumeration index: digits (party 0 obs 0, party 0 obs 1, ...,
  // party n-1 last obs), later digits fastest, digit radix |D_i|.
  [[nodiscard]] std::int64_t canonical_index(const TcProblem& problem) const {
    std::int64_t idx = 0;
    for (int i = 0; i < problem.parties(); ++i)
      for (int o = 0; o < problem.obs_shape().size(i); ++o)
        idx = idx * problem.dec_shape().size(i) +
              decisions[static_cast<size_t>(i)][static_cast<size_t>(o)];
    return idx;
  }
};

// ---------------------------------------------------------------------------
// Behavior -- conditional distribution p(d | o), stored flat like utility.
// ---------------------------------------------------------------------------
class Behavior {
 public:
  Behavior(JointShape obs_shape, JointShape dec_shape, std::vector<double> p)
      : obs_shape_(std::move(obs_shape)),
        dec_shape_(std::move(dec_shape)),
        p_(std::move(p)) {
    if (static_cast<std::int64_t>(p_.size()) != obs_shape_.total() * dec_shape_.total())
      throw input_error("Behavior: wrong length");
    const std::int64_t nd = dec_shape_.total();
    for (std::int64_t o = 0; o < obs_shape_.total(); ++o) {
      double row = 0.0;
      for (std::int64_t d = 0; d < nd; ++d) {
        const double v = p_[static_cast<size_t>(o * nd + d)];
        if (!std::isfinite(v) || v < -1e-12 || v > 1.0 + 1e-12)
          throw input_error("Behavior: entries must lie in [0, 1]");
        row += v;
      }
      if (std::abs(row - 1.0) > 1e-10)
        throw input_error("Behavior: conditional rows must sum to 1");
    }
  }

  [[nodiscard]] const JointShape& obs_shape() const { return obs_shape_; }
  [[nodiscard]] const JointShape& dec_shape() const { return dec_shape_; }
  [[nodiscard]] const std::vector<double>& probabilities() const { return p_; }

  [[nodiscard]] double operator()(std::int64_t o, std::int64_t d) const {
    return p_[static_cast<size_t>(o * dec_shape_.total() + d)];
  }

 private:
  JointShape obs_shape_;
  JointShape dec_shape_;
  std::vector<double> p_;
};

// ---------------------------------------------------------------------------
// Scoring and behavior construction.
// ---------------------------------------------------------------------------

inline double expected_utility(const TcProblem& problem, const Behavior& behavior) {
  if (behavior.obs_shape().sizes() != problem.obs_shape().sizes() ||
      behavior.dec_shape().sizes() != problem.dec_shape().sizes())
    throw input_error("expected_utility: behavior shape mismatch");
  const std::int64_t nd = problem.dec_shape().total();
  double eu = 0.0;
  for (std::int64_t o = 0; o < problem.obs_shape().total(); ++o) {
    double row = 0.0;
    for (std::int64_t d = 0; d < nd; ++d) row += behavior(o, d) * problem.utility(o, d);
    eu += problem.input_probability(o) * row;
  }
  return eu;
}

inline double expected_utility(const TcProblem& problem,
                               const DeterministicStrategy& strategy) {
  strategy.validate(problem);
  double eu = 0.0;
  for (std::int64_t o = 0; o < problem.obs_shape().total(); ++o)
    eu += problem.input_probability(o) *
          problem.utility(o, strategy.joint_decision(problem, o));
  return eu;
}

inline Behavior deterministic_behavior(const TcProblem& problem,
                                       const DeterministicStrategy& strategy) {
  strategy.validate(problem);
  const std::int64_t nd = problem.dec_shape().total();
  std::vector<double> p(static_cast<size_t>(problem.obs_shape().total() * nd), 0.0);
  for (std::int64_t o = 0; o < problem.obs_shape().total(); ++o)
    p[static_cast<size_t>(o * nd + strategy.joint_decision(problem, o))] = 1.0;
  return Behavior(problem.obs_shape(), problem.dec_shape(), std::move(p));
}

// Largest violation of marginal invariance: for every party i, the joint
// distribution of the other parties' decisions given their observations must
// not depend on o_i.
struct NoSignalingReport {
  bool ok = true;
  double max_violation = 0.0;
};

inline NoSignalingReport check_no_signaling(const Behavior& b, double tol = 1e-9) {
  const int n = b.obs_shape().arity();
  NoSignalingReport report;
  for (int i = 0; i < n; ++i) {
    // Shapes of the remaining parties.
    std::vector<int> other_obs_sizes, other_dec_sizes;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      other_obs_sizes.push_back(b.obs_shape().size(j));
      other_dec_sizes.push_back(b.dec_shape().size(j));
    }
    const JointShape oo(other_obs_sizes), od(other_dec_sizes);
    for (std::int64_t ro = 0; ro < oo.total(); ++ro) {
      const auto rest_obs = oo.unflatten(ro);
      for (std::int64_t rd = 0; rd < od.total(); ++rd) {
        const auto rest_dec = od.unflatten(rd);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int oi = 0; oi < b.obs_shape().size(i); ++oi) {
          std::vector<int> obs(static_cast<size_t>(n));
          for (int j = 0, k = 0; j < n; ++j)
            obs[static_cast<size_t>(j)] =
                (j == i) ? oi : rest_obs[static_cast<size_t>(k++)];
          const std::int64_t o = b.obs_shape().flatten(obs);
          double marginal = 0.0;
          for (int di = 0; di < b.dec_shape().size(i); ++di) {
            std::vector<int> dec(static_cast<size_t>(n));
            for (int j = 0, k = 0; j < n; ++j)
              dec[static_cast<size_t>(j)] =
                  (j == i) ? di : rest_dec[static_cast<size_t>(k++)];
            marginal += b(o, b.dec_shape().flatten(dec));
          }
          lo = std::min(lo, marginal);
          hi = std::max(hi, marginal);
        }
        report.max_violation = std::max(report.max_violation, hi - lo);
      }
    }
  }
  report.ok = report.max_violation <= tol;
  return report;
}

// ---------------------------------------------------------------------------
// Built-in problem families.
// ---------------------------------------------------------------------------

// Two parties each learn "N" (nothing happened) or "I" (an incident), drawn
// independently with P(I) = p, and choose between actions "A" and "B".
// Utility: matching on incidents and anti-matching otherwise pays 1; under a
// split observation any matched/hedged pattern pays beta or 1 - beta.
inline TcProblem make_hedge_or_not(double p, double beta) {
  if (!(p >= 0.0 && p <= 1.0)) throw input_error("make_hedge_or_not: p outside [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw input_error("make_hedge_or_not: beta outside [0, 1]");
  const std::vector<std::vector<std::string>> obs{{"N", "I"}, {"N", "I"}};
  const std::vector<std::vector<std::string>> dec{{"A", "B"}, {"A", "B"}};
  const double q = 1.0 - p;
  const std::vector<double> dist{q * q, q * p, p * q, p * p};
  const std::vector<double> utility{
      // columns: (A,A) (A,B) (B,A) (B,B)
      0.0,  1.0,        1.0,        0.0,   // (N,N)
      beta, 1.0 - beta, 1.0 - beta, beta,  // (N,I)
      beta, 1.0 - beta, 1.0 - beta, beta,  // (I,N)
      1.0,  0.0,        0.0,        1.0,   // (I,I)
  };
  return TcProblem(obs, dec, dist, utility);
}

// CHSH game with independent Bernoulli(p) inputs: pay 1 when
// d_1 XOR d_2 = o_1 AND o_2.  The anti variant pays on the complementary
// parity, d_1 XOR d_2 = NOT (o_1 AND o_2).
inline TcProblem make_chsh(double p, bool anti = false) {
  if (!(p >= 0.0 && p <= 1.0)) throw input_error("make_chsh: p outside [0, 1]");
  const std::vector<std::vector<std::string>> obs{{"0", "1"}, {"0", "1"}};
  const std::vector<std::vector<std::string>> dec{{"0", "1"}, {"0", "1"}};
  const double q = 1.0 - p;
  const std::vector<double> dist{q * q, q * p, p * q, p * p};
  std::vector<double> utility(16);
  for (int o = 0; o < 4; ++o) {
    const int target = ((o == 3) ? 1 : 0) ^ (anti ? 1 : 0);
    for (int d = 0; d < 4; ++d) {
      const int parity = (d >> 1) ^ (d & 1);
      utility[static_cast<size_t>(o * 4 + d)] = (parity == target) ? 1.0 : 0.0;
    }
  }
  return TcProblem(obs, dec, dist, utility);
}

// ---------------------------------------------------------------------------
// Relabeling.  Each permutation maps new local index -> source local index
// (gather semantics): P'.utility[o][d] = P.utility[pi(o)][sigma(d)] and
// P'.input[o] = P.input[pi(o)].  Label lists are left untouched.
// ---------------------------------------------------------------------------
inline TcProblem permute_problem(const TcProblem& problem,
                                 const std::vector<std::vector<int>>& obs_perms,
                                 const std::vector<std::vector<int>>& dec_perms) {
  const int n = problem.parties();
  auto validate_perms = [n](const std::vector<std::vector<int>>& perms,
                            const JointShape& shape, const char* kind) {
    if (static_cast<int>(perms.size()) != n)
      throw input_error(std::string("permute_problem: wrong ") + kind +
                        " permutation count");
    for (int i = 0; i < n; ++i) {
      const auto& perm = perms[static_cast<size_t>(i)];
      if (static_cast<int>(perm.size()) != shape.size(i))
        throw input_error(std::string("permute_problem: bad ") + kind +
                          " permutation length");
      std::vector<bool> seen(perm.size(), false);
      for (int v : perm) {
        if (v < 0 || v >= shape.size(i) || seen[static_cast<size_t>(v)])
          throw input_error(std::string("permute_problem: ") + kind +
                            " permutation is not a bijection");
        seen[static_cast<size_t>(v)] = true;
      }
    }
  };
  validate_perms(obs_perms, problem.obs_shape(), "observation");
  validate_perms(dec_perms, problem.dec_shape(), "decision");

  auto map_joint = [n](const JointShape& shape,
                       const std::vector<std::vector<int>>& perms,
                       std::int64_t joint) {
    auto local = shape.unflatten(joint);
    for (int i = 0; i < n; ++i)
      local[static_cast<size_t>(i)] =
          perms[static_cast<size_t>(i)][static_cast<size_t>(local[static_cast<size_t>(i)])];
    return shape.flatten(local);
  };

  const std::int64_t no = problem.obs_shape().total();
  const std::int64_t nd = problem.dec_shape().total();
  std::vector<double> dist(static_cast<size_t>(no));
  std::vector<double> utility(static_cast<size_t>(no * nd));
  for (std::int64_t o = 0; o < no; ++o) {
    const std::int64_t po = map_joint(problem.obs_shape(), obs_perms, o);
    dist[static_cast<size_t>(o)] = problem.input_probability(po);
    for (std::int64_t d = 0; d < nd; ++d)
      utility[static_cast<size_t>(o * nd + d)] =
          problem.utility(po, map_joint(problem.dec_shape(), dec_perms, d));
  }
  return TcProblem(problem.observation_labels(), problem.decision_labels(),
                   std::move(dist), std::move(utility));
}

// ---------------------------------------------------------------------------
// XOR structure.  A problem with binary decisions is an XOR array when
// utility depends on the joint decision only through the parity of its bits.
// ---------------------------------------------------------------------------

inline bool all_decisions_binary(const TcProblem& problem) {
  for (int i = 0; i < problem.parties(); ++i)
    if (problem.dec_shape().size(i) != 2) return false;
  return true;
}

inline int decision_parity(const TcProblem& problem, std::int64_t d) {
  const auto local = problem.dec_shape().unflatten(d);
  int parity = 0;
  for (int v : local) parity ^= v;
  return parity;
}

inline bool is_xor_array(const TcProblem& problem) {
  if (!all_decisions_binary(problem)) return false;
  const std::int64_t nd = problem.dec_shape().total();
  for (std::int64_t o = 0; o < problem.obs_shape().total(); ++o) {
    double value[2];
    bool seen[2] = {false, false};
    for (std::int64_t d = 0; d < nd; ++d) {
      const int parity = decision_parity(problem, d);
      if (!seen[parity]) {
        value[parity] = problem.utility(o, d);
        seen[parity] = true;
      } else if (problem.utility(o, d) != value[parity]) {
        return false;
      }
    }
  }
  return true;
}

// Swap the two parity classes of an XOR array (flip party 0's decision bit).
inline TcProblem anti_array(const TcProblem& problem) {
  if (!is_xor_array(problem)) throw input_error("anti_array: not an XOR array");
  const std::int64_t no = problem.obs_shape().total();
  const std::int64_t nd = problem.dec_shape().total();
  std::vector<double> utility(static_cast<size_t>(no * nd));
  const std::int64_t flip = nd / 2;  // party 0 is the slowest decision digit
  for (std::int64_t o = 0; o < no; ++o)
    for (std::int64_t d = 0; d < nd; ++d)
      utility[static_cast<size_t>(o * nd + d)] = problem.utility(o, d ^ flip);
  return TcProblem(problem.observation_labels(), problem.decision_labels(),
                   problem.input_distribution(), std::move(utility));
}

// ---------------------------------------------------------------------------
// Two-party binary-decision correlators and the local polytope test.
// ---------------------------------------------------------------------------
struct CorrelationMatrix {
  int rows = 0, cols = 0;
  std::vector<double> c;  // row-major

  [[nodiscard]] double operator()(int k, int l) const {
    return c[static_cast<size_t>(k * cols + l)];
  }
};

inline CorrelationMatrix correlation_matrix(const Behavior& b) {
  if (b.obs_shape().arity() != 2 || b.dec_shape().sizes() != std::vector<int>{2, 2})
    throw input_error("correlation_matrix: need two parties with binary decisions");
  CorrelationMatrix m;
  m.rows = b.obs_shape().size(0);
  m.cols = b.obs_shape().size(1);
  m.c.resize(static_cast<size_t>(m.rows * m.cols));
  for (int k = 0; k < m.rows; ++k)
    for (int l = 0; l < m.cols; ++l) {
      const std::int64_t o = b.obs_shape().flatten({k, l});
      m.c[static_cast<size_t>(k * m.cols + l)] =
          b(o, 0) + b(o, 3) - b(o, 1) - b(o, 2);
    }
  return m;
}

// Fine's criterion for (2,2,2): behavior entries nonnegative and every signed
// CHSH combination with an odd number of minus signs bounded by 2.
inline bool check_local_polytope_222(const Behavior& b, double tol = 1e-9) {
  if (b.obs_shape().sizes() != std::vector<int>{2, 2} ||
      b.dec_shape().sizes() != std::vector<int>{2, 2})
    throw input_error("check_local_polytope_222: shape must be (2,2,2)");
  for (double v : b.probabilities())
    if (v < -tol) return false;
  const CorrelationMatrix m = correlation_matrix(b);
  const double c[4] = {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
  for (int minus = 0; minus < 4; ++minus) {
    double s = 0.0;
    for (int j = 0; j < 4; ++j) s += (j == minus) ? -c[j] : c[j];
    if (std::abs(s) > 2.0 + tol) return false;
  }
  return true;
}

}  // namespace tacit

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "stablelab/prefgen.hpp"

namespace stablelab::quadrature {

/// A Monte Carlo estimate. The reported interval is value +/- 3 std_error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;

  double lower() const noexcept { return value - 3.0 * std_error; }
  double upper() const noexcept { return value + 3.0 * std_error; }
};

/// Dense polynomial in two variables xi, eta with room for fixed maximum
/// degrees. coeff(u, v) is the coefficient of xi^u eta^v.
class BivariatePoly {
 public:
  BivariatePoly(std::size_t max_deg_xi, std::size_t max_deg_eta);

  /// Resets to the constant polynomial c.
  void set_constant(double c);

  /// Multiplies in place by (c0 + c_xi xi + c_eta eta). Throws
  /// std::length_error if the capacity would be exceeded.
  void multiply_trilinear(double c0, double c_xi, double c_eta);

  void scale(double factor);

  std::size_t deg_xi() const noexcept { return deg_xi_; }
  std::size_t deg_eta() const noexcept { return deg_eta_; }
  std::size_t max_deg_xi() const noexcept { return cols_xi_ - 1; }
  std::size_t max_deg_eta() const noexcept { return cols_eta_ - 1; }

  /// Zero outside the stored range.
  double coeff(std::size_t u, std::size_t v) const noexcept {
    return u < cols_xi_ && v < cols_eta_ ? c_[u * cols_eta_ + v] : 0.0;
  }

  double evaluate(double xi, double eta) const;
  double sum() const;

  /// Row-major (max_deg_xi + 1) x (max_deg_eta + 1) coefficient storage.
  std::span<const double> data() const noexcept { return c_; }

 private:
  std::size_t cols_xi_;
  std::size_t cols_eta_;
  std::size_t deg_xi_ = 0;
  std::size_t deg_eta_ = 0;
  std::vector<double> c_;
};

/// Conditional generating polynomial of (Q - n1, R - n1) for the identity
/// injection given the latent values x_i (man i's value of his wife) and y_j
/// (woman j's value of her husband):
///
///   prod_{i != j} (xb_i yb_j + x_i yb_j xi + xb_i y_j eta) * prod_h xb_h^(n2 - n1)
///
/// with xb = 1 - x, yb = 1 - y. Throws std::domain_error on a length
/// mismatch, empty input, entries outside [0, 1] or n2 < n1.
BivariatePoly p_joint_poly(std::span<const double> x, std::span<const double> y, Index n2);

/// Sample partitioning. Batches are the unit of parallel work and of the
/// batch-means error estimate; results are reproducible for a fixed
/// (seed, batches) regardless of the thread count.
struct McConfig {
  std::size_t batches = 32;
  unsigned threads = 0;
};

/// Largest n1 accepted by p_kl_mc (coefficient matrix at most 31 x 31).
inline constexpr Index kMaxJointN1 = 6;

class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probability that a fixed injection is stable: average of
/// prod_{i != j} (1 - x_i y_j) prod_h (1 - x_h)^(n2 - n1) over the unit cube.
Estimate p_stable_mc(Index n1, Index n2, std::uint64_t samples, std::uint64_t seed,
                     McConfig config = {});

/// Averaged coefficient matrices of p_joint_poly. Entry (k, l) estimates the
/// probability that a fixed injection is stable with Q = k and R = l.
class RankTable {
 public:
  RankTable(Index n1, std::size_t dim, std::vector<double> mean,
            std::vector<std::vector<double>> batch_means, std::uint64_t samples);

  Index n1() const noexcept { return n1_; }
  /// Q and R range over [n1, n1 + dim).
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t samples() const noexcept { return samples_; }

  /// P(stable, Q = k, R = l); zero estimate outside the support.
  Estimate at(std::uint64_t k, std::uint64_t l) const;
  /// P(stable, Q = k).
  Estimate marginal_q(std::uint64_t k) const;
  /// P(stable, R = l).
  Estimate marginal_r(std::uint64_t l) const;
  /// P(stable).
  Estimate total() const;

 private:
  template <class Weight>
  Estimate functional(Weight&& weight) const;

  Index n1_;
  std::size_t dim_;
  std::vector<double> mean_;
  std::vector<std::vector<double>> batch_means_;
  std::uint64_t samples_;
};

/// Throws GuardExceeded if n1 > kMaxJointN1. Uses the same sample stream as
/// p_stable_mc for equal (n1, seed, config).
RankTable p_kl_mc(Index n1, Index n2, std::uint64_t samples, std::uint64_t seed,
                  McConfig config = {});

/// Probability that a fixed injection is stable and a fixed cyclic sequence
/// of r of its pairs is an exposed rotation:
///
///   prod_{k < r} x_k y_k * prod (1 - x_i y_j) * prod_h (1 - x_h)^(n2 - n1)
///
/// where the middle product runs over i != j except j = i + 1 (mod r) for
/// rotation men i < r. Throws std::domain_error unless 2 <= r <= n1.
Estimate p_rotation_mc(Index n1, Index n2, Index r, std::uint64_t samples, std::uint64_t seed,
                       McConfig config = {});

/// Fraction of random instances in which the identity injection is stable.
Estimate empirical_p_stable(Index n1, Index n2, std::uint64_t trials, std::uint64_t seed,
                            unsigned threads = 0);

/// Fraction of random instances in which the identity injection is stable
/// and ((0,0), (1,1), ..., (r-1,r-1)) is an exposed rotation.
Estimate empirical_p_rotation(Index n1, Index n2, Index r, std::uint64_t trials,
                              std::uint64_t seed, unsigned threads = 0);

}  // namespace stablelab::quadrature

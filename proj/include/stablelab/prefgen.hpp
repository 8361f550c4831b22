#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace stablelab {

/// Agent index. Men are 0..n1-1, women 0..n2-1.
using Index = std::uint32_t;

/// A complete two-sided preference system with n1 men and n2 >= n1 women.
///
/// Every man ranks all n2 women and every woman ranks all n1 men. Ranks are
/// 1-based (rank 1 = most preferred); indices are 0-based. The inverse rank
/// tables are built once at construction so that both "who is at position
/// p" and "where is agent a" are O(1).
class Instance {
 public:
  /// Takes row-major preference tables (n1 rows of n2 for men, n2 rows of
  /// n1 for women). Throws std::domain_error unless every row is a
  /// permutation and 1 <= n1 <= n2.
  Instance(Index n1, Index n2, std::vector<Index> men_pref, std::vector<Index> women_pref);

  /// Convenience constructor from nested lists.
  static Instance from_lists(const std::vector<std::vector<Index>>& men,
                             const std::vector<std::vector<Index>>& women);

  Index n1() const noexcept { return n1_; }
  Index n2() const noexcept { return n2_; }

  std::span<const Index> man_list(Index m) const {
    return {men_pref_.data() + std::size_t{m} * n2_, n2_};
  }
  std::span<const Index> woman_list(Index w) const {
    return {women_pref_.data() + std::size_t{w} * n1_, n1_};
  }

  /// 1-based position of woman w in man m's list.
  Index man_rank(Index m, Index w) const { return men_rank_[std::size_t{m} * n2_ + w]; }
  /// 1-based position of man m in woman w's list.
  Index woman_rank(Index w, Index m) const { return women_rank_[std::size_t{w} * n1_ + m]; }

  const std::vector<Index>& men_pref() const noexcept { return men_pref_; }
  const std::vector<Index>& women_pref() const noexcept { return women_pref_; }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.n1_ == b.n1_ && a.n2_ == b.n2_ && a.men_pref_ == b.men_pref_ &&
           a.women_pref_ == b.women_pref_;
  }

 private:
  Index n1_;
  Index n2_;
  std::vector<Index> men_pref_;
  std::vector<Index> women_pref_;
  std::vector<Index> men_rank_;
  std::vector<Index> women_rank_;
};

/// Latent uniform matrices: man i ranks women by increasing X(i, .), woman j
/// ranks men by increasing Y(., j).
struct LatentMatrices {
  Index n1 = 0;
  Index n2 = 0;
  std::vector<double> x;  // row-major n1 x n2
  std::vector<double> y;  // row-major n1 x n2

  double X(Index i, Index j) const { return x[std::size_t{i} * n2 + j]; }
  double Y(Index i, Index j) const { return y[std::size_t{i} * n2 + j]; }
};

/// Throws std::domain_error unless 1 <= n1 <= n2.
void check_shape(Index n1, Index n2);

/// Independent uniform preference permutations for every agent.
Instance gen_instance(Index n1, Index n2, std::uint64_t seed);

/// I.i.d. uniform latent matrices. Rows of X and columns of Y are free of
/// ties: a colliding entry is redrawn.
LatentMatrices gen_latents(Index n1, Index n2, std::uint64_t seed);

/// Reads preferences off the latent matrices. Throws std::logic_error on a
/// tie in a row of X or a column of Y.
Instance instance_from_latents(const LatentMatrices& latents);

}  // namespace stablelab

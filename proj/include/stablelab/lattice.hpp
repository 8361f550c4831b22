#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stablelab/engine.hpp"

namespace stablelab {

/// A cyclic sequence of matched pairs (m_1, w_1), ..., (m_r, w_r). Eliminating
/// it pairs m_i with w_{i+1}. Stored canonically: rotated so that the
/// smallest man index comes first.
class Rotation {
 public:
  using Pair = std::pair<Index, Index>;

  /// Throws std::domain_error if r < 2 or a man or woman repeats.
  explicit Rotation(std::vector<Pair> pairs);

  const std::vector<Pair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }

  friend auto operator<=>(const Rotation&, const Rotation&) = default;

 private:
  std::vector<Pair> pairs_;
};

/// Rotations exposed in the stable matching `m`, in canonical form, sorted.
/// Throws std::domain_error if `m` is not stable.
std::vector<Rotation> exposed_rotations(const Instance& inst, const Matching& m);

/// Re-pairs every m_i with w_{i+1}. Throws std::domain_error unless `rho` is
/// exposed in `m`.
Matching eliminate(const Instance& inst, const Matching& m, const Rotation& rho);

/// Every stable matching of an instance, sorted by the wife_of sequence.
struct StableSet {
  std::vector<Matching> matchings;
  std::size_t men_optimal = 0;    // index into matchings
  std::size_t women_optimal = 0;  // index into matchings
  std::vector<Index> per_man_partner_count;
  std::vector<Index> per_woman_partner_count;
  /// Distinct rotations exposed in any member.
  std::vector<Rotation> rotations;

  std::size_t size() const noexcept { return matchings.size(); }
  const Matching& men_optimal_matching() const { return matchings.at(men_optimal); }
  const Matching& women_optimal_matching() const { return matchings.at(women_optimal); }
};

/// Thrown when enumeration would exceed the configured set-size cap.
class EnumerationCapExceeded : public std::runtime_error {
 public:
  explicit EnumerationCapExceeded(std::size_t cap);
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

/// Thrown when brute force would need too many injections.
class OracleBoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerateOptions {
  std::size_t cap = 1'000'000;
};

/// Depth-first walk from the men-optimal matching over exposed rotations,
/// deduplicated by wife_of.
StableSet enumerate_all(const Instance& inst, EnumerateOptions options = {});

struct BruteForceOptions {
  std::uint64_t max_injections = 10'000'000;
};

/// Filters every injection through is_stable. Used as the oracle for
/// enumerate_all.
StableSet brute_force_all(const Instance& inst, BruteForceOptions options = {});

struct Multiplicity {
  double m_frac = 0.0;
  double w_frac = 0.0;
  std::uint64_t total_rotation_length = 0;
};

/// Fractions of men and of all n2 women with two or more stable partners,
/// plus the summed length of the distinct rotations.
Multiplicity multiplicity(const StableSet& ss);

/// Number of injections [n1] -> [n2], saturating at UINT64_MAX.
std::uint64_t injection_count(Index n1, Index n2);

}  // namespace stablelab

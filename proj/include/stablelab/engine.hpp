#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stablelab/prefgen.hpp"

namespace stablelab {

inline constexpr Index kUnmatched = std::numeric_limits<Index>::max();

/// An injection from men into women. `husband_of` is kept as the exact
/// inverse; the n2 - n1 women outside the image carry kUnmatched.
struct Matching {
  std::vector<Index> wife_of;
  std::vector<Index> husband_of;

  /// Builds the inverse table. Throws std::domain_error if `wife_of` is not
  /// an injection into [0, n2).
  static Matching from_wives(std::vector<Index> wife_of, Index n2);

  std::vector<Index> matched_women() const;
  std::vector<Index> unmatched_women() const;

  friend bool operator==(const Matching& a, const Matching& b) { return a.wife_of == b.wife_of; }
};

/// Wives' total rank Q and husbands' total rank R of a matching. The
/// proposal count is only set for matchings produced by `propose`.
struct RankPair {
  std::uint64_t q = 0;
  std::uint64_t r = 0;
  std::optional<std::uint64_t> proposals;
};

enum class Side { Men, Women };

struct ProposalResult {
  Matching matching;
  RankPair ranks;
};

/// Sequential deferred acceptance (one proposal at a time). Side::Men gives
/// the men-optimal stable matching, Side::Women the women-optimal one.
///
/// Free proposers are kept on an implicit stack: proposers start in index
/// order and a displaced partner proposes again immediately. An unmatched
/// woman accepts any man. In the women-proposing run a woman who has been
/// refused by all n1 men stays unmatched.
ProposalResult propose(const Instance& inst, Side side);

/// Throws std::domain_error if `m` is not a structurally valid matching for
/// `inst` (sizes, injectivity, inverse table, number of unmatched women).
void check_matching(const Instance& inst, const Matching& m);

/// True iff no pair (m, w) blocks: m prefers w to his wife and w is either
/// unmatched or prefers m to her husband.
bool is_stable(const Instance& inst, const Matching& m);

/// Q = sum of men's ranks of their wives, R = sum of matched women's ranks
/// of their husbands.
RankPair ranks(const Instance& inst, const Matching& m);

}  // namespace stablelab

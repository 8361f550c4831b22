#pragma once

// Test-only oracles. Nothing here calls into the code under test except to
// build Instance objects from explicit lists.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "stablelab/prefgen.hpp"

namespace oracle {

using stablelab::Index;
using Lists = std::vector<std::vector<Index>>;

inline std::vector<std::vector<Index>> permutations(Index k) {
  std::vector<Index> p(k);
  std::iota(p.begin(), p.end(), Index{0});
  std::vector<std::vector<Index>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Calls fn(men, women) once for every preference system of the given shape.
inline void for_each_system(Index n1, Index n2, const std::function<void(const Lists&, const Lists&)>& fn) {
  const auto men_perms = permutations(n2);
  const auto women_perms = permutations(n1);
  std::vector<std::size_t> digits(n1 + n2, 0);
  Lists men(n1);
  Lists women(n2);
  while (true) {
    for (Index m = 0; m < n1; ++m) men[m] = men_perms[digits[m]];
    for (Index w = 0; w < n2; ++w) women[w] = women_perms[digits[n1 + w]];
    fn(men, women);
    std::size_t pos = 0;
    while (pos < digits.size()) {
      const std::size_t base = pos < n1 ? men_perms.size() : women_perms.size();
      if (++digits[pos] < base) break;
      digits[pos++] = 0;
    }
    if (pos == digits.size()) return;
  }
}

inline std::size_t position(const std::vector<Index>& list, Index who) {
  return static_cast<std::size_t>(std::find(list.begin(), list.end(), who) - list.begin());
}

/// Blocking-pair search straight off the lists. `wife[m]` is man m's wife.
inline bool naive_stable(const Lists& men, const Lists& women, const std::vector<Index>& wife) {
  const Index n1 = static_cast<Index>(men.size());
  const Index n2 = static_cast<Index>(women.size());
  std::vector<long> husband(n2, -1);
  for (Index m = 0; m < n1; ++m) husband[wife[m]] = m;
  for (Index m = 0; m < n1; ++m) {
    for (Index w = 0; w < n2; ++w) {
      if (w == wife[m]) continue;
      const bool man_wants = position(men[m], w) < position(men[m], wife[m]);
      if (!man_wants) continue;
      if (husband[w] < 0) return false;
      if (position(women[w], m) < position(women[w], static_cast<Index>(husband[w]))) return false;
    }
  }
  return true;
}

/// Every injection [n1] -> [n2] as a wife vector.
inline std::vector<std::vector<Index>> injections(Index n1, Index n2) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> cur;
  std::vector<bool> used(n2, false);
  std::function<void()> rec = [&] {
    if (cur.size() == n1) {
      out.push_back(cur);
      return;
    }
    for (Index w = 0; w < n2; ++w) {
      if (used[w]) continue;
      used[w] = true;
      cur.push_back(w);
      rec();
      cur.pop_back();
      used[w] = false;
    }
  };
  rec();
  return out;
}

/// All stable injections, sorted.
inline std::vector<std::vector<Index>> naive_stable_set(const Lists& men, const Lists& women) {
  std::vector<std::vector<Index>> out;
  for (auto& inj : injections(static_cast<Index>(men.size()), static_cast<Index>(women.size()))) {
    if (naive_stable(men, women, inj)) out.push_back(inj);
  }
  return out;
}

/// (Q, R) of a matching, straight off the lists (1-based ranks).
inline std::pair<std::uint64_t, std::uint64_t> naive_ranks(const Lists& men, const Lists& women,
                                                           const std::vector<Index>& wife) {
  std::uint64_t q = 0;
  std::uint64_t r = 0;
  for (Index m = 0; m < men.size(); ++m) {
    q += position(men[m], wife[m]) + 1;
    r += position(women[wife[m]], m) + 1;
  }
  return {q, r};
}

/// Exact joint distribution of (Q, R) on the event "identity injection is
/// stable", as counts over all preference systems, plus the system count.
struct JointCounts {
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> counts;
  std::uint64_t stable = 0;
  std::uint64_t systems = 0;
};

inline JointCounts identity_joint_counts(Index n1, Index n2) {
  JointCounts jc;
  std::vector<Index> identity(n1);
  std::iota(identity.begin(), identity.end(), Index{0});
  for_each_system(n1, n2, [&](const Lists& men, const Lists& women) {
    ++jc.systems;
    if (!naive_stable(men, women, identity)) return;
    ++jc.stable;
    ++jc.counts[naive_ranks(men, women, identity)];
  });
  return jc;
}

}  // namespace oracle

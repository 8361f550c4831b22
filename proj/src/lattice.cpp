#include "stablelab/lattice.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <unordered_set>

namespace stablelab {

Rotation::Rotation(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.size() < 2) throw std::domain_error("rotation needs at least two pairs");
  std::vector<Index> men;
  std::vector<Index> women;
  for (const auto& [m, w] : pairs_) {
    men.push_back(m);
    women.push_back(w);
  }
  std::sort(men.begin(), men.end());
  std::sort(women.begin(), women.end());
  if (std::adjacent_find(men.begin(), men.end()) != men.end() ||
      std::adjacent_find(women.begin(), women.end()) != women.end()) {
    throw std::domain_error("rotation repeats an agent");
  }
  auto first = std::min_element(pairs_.begin(), pairs_.end(),
                                [](const Pair& a, const Pair& b) { return a.first < b.first; });
  std::rotate(pairs_.begin(), first, pairs_.end());
}

EnumerationCapExceeded::EnumerationCapExceeded(std::size_t cap)
    : std::runtime_error("stable set exceeds the cap of " + std::to_string(cap) + " matchings"),
      cap_(cap) {}

namespace {

// Rotations of a matching already known to be stable. For each man the
// successor is the first woman below his wife who is either unmatched or
// prefers him to her husband. An unmatched successor gives the man no edge:
// moving him past her would make them a blocking pair. The rotations are the
// cycles of man -> husband of his successor.
std::vector<Rotation> rotations_of_stable(const Instance& inst, const Matching& m) {
  const Index n1 = inst.n1();
  std::vector<Index> next_man(n1, kUnmatched);
  for (Index man = 0; man < n1; ++man) {
    const auto list = inst.man_list(man);
    for (Index p = inst.man_rank(man, m.wife_of[man]); p < inst.n2(); ++p) {
      const Index w = list[p];
      const Index h = m.husband_of[w];
      if (h == kUnmatched) break;
      if (inst.woman_rank(w, man) < inst.woman_rank(w, h)) {
        next_man[man] = h;
        break;
      }
    }
  }

  // Cycle detection on the functional graph; state 0 = new, 1 = on the
  // current path, 2 = finished.
  std::vector<std::uint8_t> state(n1, 0);
  std::vector<Rotation> out;
  std::vector<Index> path;
  for (Index start = 0; start < n1; ++start) {
    if (state[start] != 0) continue;
    path.clear();
    Index cur = start;
    while (cur != kUnmatched && state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = next_man[cur];
    }
    if (cur != kUnmatched && state[cur] == 1) {
      auto it = std::find(path.begin(), path.end(), cur);
      std::vector<Rotation::Pair> pairs;
      for (; it != path.end(); ++it) pairs.emplace_back(*it, m.wife_of[*it]);
      out.emplace_back(std::move(pairs));
    }
    for (Index v : path) state[v] = 2;
  }
  std::sort(out.begin(), out.end());
  return out;
}

Matching apply_rotation(const Matching& m, const Rotation& rho) {
  Matching out = m;
  const auto& pairs = rho.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [man, _] = pairs[i];
    const Index w = pairs[(i + 1) % pairs.size()].second;
    out.wife_of[man] = w;
    out.husband_of[w] = man;
  }
  return out;
}

struct WivesHash {
  std::size_t operator()(const std::vector<Index>& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Index x : v) {
      h ^= x;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

StableSet finalize(const Instance& inst, std::vector<Matching> members,
                   std::vector<Rotation> rotations) {
  StableSet ss;
  std::sort(members.begin(), members.end(),
            [](const Matching& a, const Matching& b) { return a.wife_of < b.wife_of; });
  ss.matchings = std::move(members);

  auto locate = [&](const Matching& target) {
    auto it = std::lower_bound(
        ss.matchings.begin(), ss.matchings.end(), target,
        [](const Matching& a, const Matching& b) { return a.wife_of < b.wife_of; });
    if (it == ss.matchings.end() || !(*it == target)) {
      throw std::logic_error("side-optimal matching missing from the stable set");
    }
    return static_cast<std::size_t>(it - ss.matchings.begin());
  };
  ss.men_optimal = locate(propose(inst, Side::Men).matching);
  ss.women_optimal = locate(propose(inst, Side::Women).matching);

  ss.per_man_partner_count.assign(inst.n1(), 0);
  ss.per_woman_partner_count.assign(inst.n2(), 0);
  std::vector<Index> partners;
  for (Index man = 0; man < inst.n1(); ++man) {
    partners.clear();
    for (const auto& mm : ss.matchings) partners.push_back(mm.wife_of[man]);
    std::sort(partners.begin(), partners.end());
    ss.per_man_partner_count[man] = static_cast<Index>(
        std::unique(partners.begin(), partners.end()) - partners.begin());
  }
  for (Index w = 0; w < inst.n2(); ++w) {
    partners.clear();
    for (const auto& mm : ss.matchings) {
      if (mm.husband_of[w] != kUnmatched) partners.push_back(mm.husband_of[w]);
    }
    std::sort(partners.begin(), partners.end());
    ss.per_woman_partner_count[w] = static_cast<Index>(
        std::unique(partners.begin(), partners.end()) - partners.begin());
  }

  std::sort(rotations.begin(), rotations.end());
  rotations.erase(std::unique(rotations.begin(), rotations.end()), rotations.end());
  ss.rotations = std::move(rotations);
  return ss;
}

}  // namespace

std::vector<Rotation> exposed_rotations(const Instance& inst, const Matching& m) {
  if (!is_stable(inst, m)) throw std::domain_error("matching is not stable");
  return rotations_of_stable(inst, m);
}

Matching eliminate(const Instance& inst, const Matching& m, const Rotation& rho) {
  const auto exposed = exposed_rotations(inst, m);
  if (!std::binary_search(exposed.begin(), exposed.end(), rho)) {
    throw std::domain_error("rotation is not exposed in the matching");
  }
  return apply_rotation(m, rho);
}

StableSet enumerate_all(const Instance& inst, EnumerateOptions options) {
  std::unordered_set<std::vector<Index>, WivesHash> seen;
  std::vector<Matching> members;
  std::vector<Rotation> rotations;
  std::vector<Matching> stack;

  Matching start = propose(inst, Side::Men).matching;
  seen.insert(start.wife_of);
  stack.push_back(std::move(start));
  while (!stack.empty()) {
    Matching cur = std::move(stack.back());
    stack.pop_back();
    for (const auto& rho : rotations_of_stable(inst, cur)) {
      Matching next = apply_rotation(cur, rho);
      rotations.push_back(rho);
      if (seen.insert(next.wife_of).second) {
        if (seen.size() > options.cap) throw EnumerationCapExceeded(options.cap);
        stack.push_back(std::move(next));
      }
    }
    members.push_back(std::move(cur));
  }
  return finalize(inst, std::move(members), std::move(rotations));
}

std::uint64_t injection_count(Index n1, Index n2) {
  std::uint64_t total = 1;
  for (Index k = 0; k < n1; ++k) {
    const std::uint64_t factor = n2 - k;
    if (total > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= factor;
  }
  return total;
}

StableSet brute_force_all(const Instance& inst, BruteForceOptions options) {
  const Index n1 = inst.n1();
  const Index n2 = inst.n2();
  if (injection_count(n1, n2) > options.max_injections) {
    throw OracleBoundExceeded("brute force would enumerate more than " +
                              std::to_string(options.max_injections) + " injections");
  }

  std::vector<Matching> members;
  std::vector<Rotation> rotations;
  Matching cur{std::vector<Index>(n1, kUnmatched), std::vector<Index>(n2, kUnmatched)};

  // Assign men in order; each man tries every still-free woman.
  auto extend = [&](auto&& self, Index man) -> void {
    if (man == n1) {
      if (is_stable(inst, cur)) {
        auto rs = rotations_of_stable(inst, cur);
        rotations.insert(rotations.end(), rs.begin(), rs.end());
        members.push_back(cur);
      }
      return;
    }
    for (Index w = 0; w < n2; ++w) {
      if (cur.husband_of[w] != kUnmatched) continue;
      cur.wife_of[man] = w;
      cur.husband_of[w] = man;
      self(self, man + 1);
      cur.husband_of[w] = kUnmatched;
    }
    cur.wife_of[man] = kUnmatched;
  };
  extend(extend, 0);
  return finalize(inst, std::move(members), std::move(rotations));
}

Multiplicity multiplicity(const StableSet& ss) {
  Multiplicity out;
  const auto multi = [](const std::vector<Index>& counts) {
    return static_cast<double>(std::count_if(counts.begin(), counts.end(),
                                             [](Index c) { return c >= 2; }));
  };
  if (!ss.per_man_partner_count.empty()) {
    out.m_frac = multi(ss.per_man_partner_count) / ss.per_man_partner_count.size();
  }
  if (!ss.per_woman_partner_count.empty()) {
    out.w_frac = multi(ss.per_woman_partner_count) / ss.per_woman_partner_count.size();
  }
  for (const auto& rho : ss.rotations) out.total_rotation_length += rho.size();
  return out;
}

}  // namespace stablelab

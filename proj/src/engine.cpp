#include "stablelab/engine.hpp"

#include <stdexcept>

namespace stablelab {

Matching Matching::from_wives(std::vector<Index> wife_of, Index n2) {
  Matching out;
  out.husband_of.assign(n2, kUnmatched);
  for (Index m = 0; m < wife_of.size(); ++m) {
    const Index w = wife_of[m];
    if (w >= n2) throw std::domain_error("wife index out of range");
    if (out.husband_of[w] != kUnmatched) throw std::domain_error("matching is not injective");
    out.husband_of[w] = m;
  }
  out.wife_of = std::move(wife_of);
  return out;
}

std::vector<Index> Matching::matched_women() const {
  std::vector<Index> out;
  for (Index w = 0; w < husband_of.size(); ++w) {
    if (husband_of[w] != kUnmatched) out.push_back(w);
  }
  return out;
}

std::vector<Index> Matching::unmatched_women() const {
  std::vector<Index> out;
  for (Index w = 0; w < husband_of.size(); ++w) {
    if (husband_of[w] == kUnmatched) out.push_back(w);
  }
  return out;
}

namespace {

Matching men_propose(const Instance& inst, std::uint64_t& proposals) {
  const Index n1 = inst.n1();
  const Index n2 = inst.n2();
  Matching out{std::vector<Index>(n1, kUnmatched), std::vector<Index>(n2, kUnmatched)};
  std::vector<Index> cursor(n1, 0);
  for (Index start = 0; start < n1; ++start) {
    Index man = start;
    // A free man always finds a free woman before his list runs out, since
    // fewer than n1 <= n2 women are held.
    while (man != kUnmatched) {
      const Index w = inst.man_list(man)[cursor[man]++];
      ++proposals;
      const Index holder = out.husband_of[w];
      if (holder == kUnmatched) {
        out.husband_of[w] = man;
        out.wife_of[man] = w;
        man = kUnmatched;
      } else if (inst.woman_rank(w, man) < inst.woman_rank(w, holder)) {
        out.husband_of[w] = man;
        out.wife_of[man] = w;
        out.wife_of[holder] = kUnmatched;
        man = holder;
      }
    }
  }
  return out;
}

Matching women_propose(const Instance& inst, std::uint64_t& proposals) {
  const Index n1 = inst.n1();
  const Index n2 = inst.n2();
  Matching out{std::vector<Index>(n1, kUnmatched), std::vector<Index>(n2, kUnmatched)};
  std::vector<Index> cursor(n2, 0);
  for (Index start = 0; start < n2; ++start) {
    Index woman = start;
    while (woman != kUnmatched) {
      if (cursor[woman] == n1) break;  // refused by everyone
      const Index m = inst.woman_list(woman)[cursor[woman]++];
      ++proposals;
      const Index holder = out.wife_of[m];
      if (holder == kUnmatched) {
        out.wife_of[m] = woman;
        out.husband_of[woman] = m;
        woman = kUnmatched;
      } else if (inst.man_rank(m, woman) < inst.man_rank(m, holder)) {
        out.wife_of[m] = woman;
        out.husband_of[woman] = m;
        out.husband_of[holder] = kUnmatched;
        woman = holder;
      }
    }
  }
  return out;
}

}  // namespace

ProposalResult propose(const Instance& inst, Side side) {
  std::uint64_t proposals = 0;
  Matching m = side == Side::Men ? men_propose(inst, proposals) : women_propose(inst, proposals);
  RankPair rp = ranks(inst, m);
  rp.proposals = proposals;
  return {std::move(m), rp};
}

void check_matching(const Instance& inst, const Matching& m) {
  const Index n1 = inst.n1();
  const Index n2 = inst.n2();
  if (m.wife_of.size() != n1 || m.husband_of.size() != n2) {
    throw std::domain_error("matching size does not fit the instance");
  }
  std::vector<bool> seen(n2, false);
  for (Index man = 0; man < n1; ++man) {
    const Index w = m.wife_of[man];
    if (w >= n2) throw std::domain_error("man left unmatched or wife index out of range");
    if (seen[w]) throw std::domain_error("matching is not injective");
    seen[w] = true;
    if (m.husband_of[w] != man) throw std::domain_error("husband table is not the inverse");
  }
  for (Index w = 0; w < n2; ++w) {
    if (!seen[w] && m.husband_of[w] != kUnmatched) {
      throw std::domain_error("husband table is not the inverse");
    }
  }
}

bool is_stable(const Instance& inst, const Matching& m) {
  check_matching(inst, m);
  for (Index man = 0; man < inst.n1(); ++man) {
    const auto list = inst.man_list(man);
    const Index better = inst.man_rank(man, m.wife_of[man]) - 1;
    for (Index p = 0; p < better; ++p) {
      const Index w = list[p];
      const Index h = m.husband_of[w];
      if (h == kUnmatched || inst.woman_rank(w, man) < inst.woman_rank(w, h)) return false;
    }
  }
  return true;
}

RankPair ranks(const Instance& inst, const Matching& m) {
  check_matching(inst, m);
  RankPair out;
  for (Index man = 0; man < inst.n1(); ++man) {
    const Index w = m.wife_of[man];
    out.q += inst.man_rank(man, w);
    out.r += inst.woman_rank(w, man);
  }
  return out;
}

}  // namespace stablelab

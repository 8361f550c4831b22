#include "stablelab/prefgen.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "stablelab/rng.hpp"

namespace stablelab {

namespace {

// Fills `rank` with the 1-based inverse of each row of `pref`, rejecting rows
// that are not permutations of [0, width).
void invert_rows(const std::vector<Index>& pref, std::size_t rows, Index width,
                 std::vector<Index>& rank, const char* side) {
  rank.assign(rows * width, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (Index p = 0; p < width; ++p) {
      const Index agent = pref[r * width + p];
      if (agent >= width || rank[r * width + agent] != 0) {
        throw std::domain_error(std::string(side) + " preference row " + std::to_string(r) +
                                " is not a permutation");
      }
      rank[r * width + agent] = p + 1;
    }
  }
}

void shuffle_rows(std::vector<Index>& table, std::size_t rows, Index width, rng::Engine& eng) {
  for (std::size_t r = 0; r < rows; ++r) {
    Index* row = table.data() + r * width;
    std::iota(row, row + width, Index{0});
    for (Index i = width; i > 1; --i) {
      const auto j = static_cast<Index>(eng.below(i));
      std::swap(row[i - 1], row[j]);
    }
  }
}

}  // namespace

void check_shape(Index n1, Index n2) {
  if (n1 == 0) throw std::domain_error("n1 must be at least 1");
  if (n2 < n1) throw std::domain_error("n2 must be at least n1");
}

Instance::Instance(Index n1, Index n2, std::vector<Index> men_pref, std::vector<Index> women_pref)
    : n1_(n1), n2_(n2), men_pref_(std::move(men_pref)), women_pref_(std::move(women_pref)) {
  check_shape(n1, n2);
  const std::size_t cells = std::size_t{n1} * n2;
  if (men_pref_.size() != cells || women_pref_.size() != cells) {
    throw std::domain_error("preference tables have the wrong size");
  }
  invert_rows(men_pref_, n1_, n2_, men_rank_, "man");
  invert_rows(women_pref_, n2_, n1_, women_rank_, "woman");
}

Instance Instance::from_lists(const std::vector<std::vector<Index>>& men,
                              const std::vector<std::vector<Index>>& women) {
  const auto n1 = static_cast<Index>(men.size());
  const auto n2 = static_cast<Index>(women.size());
  std::vector<Index> mp;
  std::vector<Index> wp;
  mp.reserve(std::size_t{n1} * n2);
  wp.reserve(std::size_t{n1} * n2);
  for (const auto& row : men) {
    if (row.size() != n2) throw std::domain_error("man list length must equal n2");
    mp.insert(mp.end(), row.begin(), row.end());
  }
  for (const auto& row : women) {
    if (row.size() != n1) throw std::domain_error("woman list length must equal n1");
    wp.insert(wp.end(), row.begin(), row.end());
  }
  return Instance(n1, n2, std::move(mp), std::move(wp));
}

Instance gen_instance(Index n1, Index n2, std::uint64_t seed) {
  check_shape(n1, n2);
  rng::Engine eng(rng::derive_seed(seed, rng::stream::kInstance));
  std::vector<Index> men(std::size_t{n1} * n2);
  std::vector<Index> women(std::size_t{n1} * n2);
  shuffle_rows(men, n1, n2, eng);
  shuffle_rows(women, n2, n1, eng);
  return Instance(n1, n2, std::move(men), std::move(women));
}

LatentMatrices gen_latents(Index n1, Index n2, std::uint64_t seed) {
  check_shape(n1, n2);
  rng::Engine eng(rng::derive_seed(seed, rng::stream::kLatent));
  LatentMatrices out{n1, n2, {}, {}};
  const std::size_t cells = std::size_t{n1} * n2;
  out.x.resize(cells);
  out.y.resize(cells);
  for (auto& v : out.x) v = eng.uniform01();
  for (auto& v : out.y) v = eng.uniform01();

  // Redraw duplicates within each row of X and each column of Y.
  std::vector<double> scratch;
  auto has_duplicate = [&](auto&& get, Index len) -> std::optional<Index> {
    scratch.resize(len);
    for (Index k = 0; k < len; ++k) scratch[k] = get(k);
    std::vector<Index> order(len);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scratch[a] < scratch[b]; });
    for (Index k = 1; k < len; ++k) {
      if (scratch[order[k]] == scratch[order[k - 1]]) return order[k];
    }
    return std::nullopt;
  };
  for (Index i = 0; i < n1; ++i) {
    while (auto dup = has_duplicate([&](Index j) { return out.X(i, j); }, n2)) {
      out.x[std::size_t{i} * n2 + *dup] = eng.uniform01();
    }
  }
  for (Index j = 0; j < n2; ++j) {
    while (auto dup = has_duplicate([&](Index i) { return out.Y(i, j); }, n1)) {
      out.y[std::size_t{*dup} * n2 + j] = eng.uniform01();
    }
  }
  return out;
}

Instance instance_from_latents(const LatentMatrices& latents) {
  const Index n1 = latents.n1;
  const Index n2 = latents.n2;
  check_shape(n1, n2);
  const std::size_t cells = std::size_t{n1} * n2;
  if (latents.x.size() != cells || latents.y.size() != cells) {
    throw std::domain_error("latent matrices have the wrong size");
  }
  std::vector<Index> men(cells);
  std::vector<Index> women(cells);
  for (Index i = 0; i < n1; ++i) {
    auto row = std::span(men).subspan(std::size_t{i} * n2, n2);
    std::iota(row.begin(), row.end(), Index{0});
    std::sort(row.begin(), row.end(),
              [&](Index a, Index b) { return latents.X(i, a) < latents.X(i, b); });
    for (Index p = 1; p < n2; ++p) {
      if (latents.X(i, row[p]) == latents.X(i, row[p - 1])) {
        throw std::logic_error("tie in latent row " + std::to_string(i));
      }
    }
  }
  for (Index j = 0; j < n2; ++j) {
    auto col = std::span(women).subspan(std::size_t{j} * n1, n1);
    std::iota(col.begin(), col.end(), Index{0});
    std::sort(col.begin(), col.end(),
              [&](Index a, Index b) { return latents.Y(a, j) < latents.Y(b, j); });
    for (Index p = 1; p < n1; ++p) {
      if (latents.Y(col[p], j) == latents.Y(col[p - 1], j)) {
        throw std::logic_error("tie in latent column " + std::to_string(j));
      }
    }
  }
  return Instance(n1, n2, std::move(men), std::move(women));
}

}  // namespace stablelab

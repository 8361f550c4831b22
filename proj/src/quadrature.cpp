#include "stablelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stablelab/engine.hpp"
#include "stablelab/lattice.hpp"
#include "stablelab/parallel.hpp"
#include "stablelab/rng.hpp"

namespace stablelab::quadrature {

BivariatePoly::BivariatePoly(std::size_t max_deg_xi, std::size_t max_deg_eta)
    : cols_xi_(max_deg_xi + 1), cols_eta_(max_deg_eta + 1), c_(cols_xi_ * cols_eta_, 0.0) {
  c_[0] = 1.0;
}

void BivariatePoly::set_constant(double c) {
  std::fill(c_.begin(), c_.end(), 0.0);
  c_[0] = c;
  deg_xi_ = 0;
  deg_eta_ = 0;
}

void BivariatePoly::multiply_trilinear(double c0, double c_xi, double c_eta) {
  if (deg_xi_ + 1 >= cols_xi_ || deg_eta_ + 1 >= cols_eta_) {
    throw std::length_error("polynomial capacity exceeded");
  }
  const std::size_t new_u = deg_xi_ + 1;
  const std::size_t new_v = deg_eta_ + 1;
  // Descending sweep: (u-1, v) and (u, v-1) are still the old values.
  for (std::size_t u = new_u + 1; u-- > 0;) {
    double* row = c_.data() + u * cols_eta_;
    const double* above = u > 0 ? c_.data() + (u - 1) * cols_eta_ : nullptr;
    for (std::size_t v = new_v + 1; v-- > 0;) {
      double acc = c0 * row[v];
      if (above) acc += c_xi * above[v];
      if (v > 0) acc += c_eta * row[v - 1];
      row[v] = acc;
    }
  }
  deg_xi_ = new_u;
  deg_eta_ = new_v;
}

void BivariatePoly::scale(double factor) {
  for (auto& c : c_) c *= factor;
}

double BivariatePoly::evaluate(double xi, double eta) const {
  // Horner in xi over rows, each row Horner in eta.
  double out = 0.0;
  for (std::size_t u = cols_xi_; u-- > 0;) {
    double row = 0.0;
    for (std::size_t v = cols_eta_; v-- > 0;) row = row * eta + c_[u * cols_eta_ + v];
    out = out * xi + row;
  }
  return out;
}

double BivariatePoly::sum() const { return std::accumulate(c_.begin(), c_.end(), 0.0); }

namespace {

void check_unit(std::span<const double> v) {
  for (double e : v) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::domain_error("latent values must lie in [0, 1]");
  }
}

double unmatched_factor(std::span<const double> x, Index gap) {
  double out = 1.0;
  if (gap == 0) return out;
  for (double xi : x) out *= std::pow(1.0 - xi, static_cast<double>(gap));
  return out;
}

void fill_joint_poly(std::span<const double> x, std::span<const double> y, Index n2,
                     BivariatePoly& poly) {
  const std::size_t n1 = x.size();
  poly.set_constant(1.0);
  for (std::size_t i = 0; i < n1; ++i) {
    const double xb = 1.0 - x[i];
    for (std::size_t j = 0; j < n1; ++j) {
      if (i == j) continue;
      const double yb = 1.0 - y[j];
      poly.multiply_trilinear(xb * yb, x[i] * yb, xb * y[j]);
    }
  }
  poly.scale(unmatched_factor(x, n2 - static_cast<Index>(n1)));
}

double stable_integrand(std::span<const double> x, std::span<const double> y, Index n2) {
  const std::size_t n1 = x.size();
  double out = unmatched_factor(x, n2 - static_cast<Index>(n1));
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      if (i != j) out *= 1.0 - x[i] * y[j];
    }
  }
  return out;
}

double rotation_integrand(std::span<const double> x, std::span<const double> y, Index n2,
                          Index r) {
  const std::size_t n1 = x.size();
  double out = unmatched_factor(x, n2 - static_cast<Index>(n1));
  for (std::size_t k = 0; k < r; ++k) out *= x[k] * y[k];
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t skip = i < r ? (i + 1) % r : n1;
    for (std::size_t j = 0; j < n1; ++j) {
      if (i != j && j != skip) out *= 1.0 - x[i] * y[j];
    }
  }
  return out;
}

std::vector<std::uint64_t> batch_sizes(std::uint64_t samples, std::size_t batches) {
  if (samples == 0) throw std::domain_error("need at least one sample");
  if (batches == 0) throw std::domain_error("need at least one batch");
  const auto b = static_cast<std::size_t>(std::min<std::uint64_t>(batches, samples));
  std::vector<std::uint64_t> sizes(b, samples / b);
  for (std::size_t k = 0; k < samples % b; ++k) ++sizes[k];
  return sizes;
}

// Batch-means standard error of the mean.
double batch_error(const std::vector<double>& means) {
  const std::size_t b = means.size();
  if (b < 2) return 0.0;
  const double avg = std::accumulate(means.begin(), means.end(), 0.0) / b;
  double ss = 0.0;
  for (double m : means) ss += (m - avg) * (m - avg);
  return std::sqrt(ss / (b - 1) / b);
}

template <class Integrand>
Estimate scalar_mc(Index n1, std::uint64_t samples, std::uint64_t seed, McConfig config,
                   Integrand&& integrand) {
  const auto sizes = batch_sizes(samples, config.batches);
  std::vector<double> sums(sizes.size(), 0.0);
  parallel_for(sizes.size(), config.threads, [&](std::size_t b) {
    rng::Engine eng(rng::derive_seed(seed, rng::stream::kQuadrature + b));
    std::vector<double> x(n1);
    std::vector<double> y(n1);
    double acc = 0.0;
    for (std::uint64_t s = 0; s < sizes[b]; ++s) {
      for (auto& v : x) v = eng.uniform01();
      for (auto& v : y) v = eng.uniform01();
      acc += integrand(std::span<const double>(x), std::span<const double>(y));
    }
    sums[b] = acc;
  });
  std::vector<double> means(sizes.size());
  double total = 0.0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    total += sums[b];
    means[b] = sums[b] / static_cast<double>(sizes[b]);
  }
  return {total / static_cast<double>(samples), batch_error(means), samples};
}

void check_quadrature_shape(Index n1, Index n2) {
  if (n1 == 0) throw std::domain_error("n1 must be at least 1");
  if (n2 < n1) throw std::domain_error("n2 must be at least n1");
}

}  // namespace

BivariatePoly p_joint_poly(std::span<const double> x, std::span<const double> y, Index n2) {
  if (x.size() != y.size()) throw std::domain_error("x and y must have equal length");
  if (x.empty()) throw std::domain_error("need at least one man");
  if (n2 < x.size()) throw std::domain_error("n2 must be at least n1");
  check_unit(x);
  check_unit(y);
  const std::size_t deg = x.size() * (x.size() - 1);
  BivariatePoly poly(deg, deg);
  fill_joint_poly(x, y, n2, poly);
  return poly;
}

Estimate p_stable_mc(Index n1, Index n2, std::uint64_t samples, std::uint64_t seed,
                     McConfig config) {
  check_quadrature_shape(n1, n2);
  return scalar_mc(n1, samples, seed, config, [n2](auto x, auto y) {
    return stable_integrand(x, y, n2);
  });
}

Estimate p_rotation_mc(Index n1, Index n2, Index r, std::uint64_t samples, std::uint64_t seed,
                       McConfig config) {
  check_quadrature_shape(n1, n2);
  if (r < 2 || r > n1) throw std::domain_error("rotation length must lie in [2, n1]");
  return scalar_mc(n1, samples, seed, config, [n2, r](auto x, auto y) {
    return rotation_integrand(x, y, n2, r);
  });
}

RankTable::RankTable(Index n1, std::size_t dim, std::vector<double> mean,
                     std::vector<std::vector<double>> batch_means, std::uint64_t samples)
    : n1_(n1),
      dim_(dim),
      mean_(std::move(mean)),
      batch_means_(std::move(batch_means)),
      samples_(samples) {}

template <class Weight>
Estimate RankTable::functional(Weight&& weight) const {
  auto apply = [&](const std::vector<double>& m) {
    double acc = 0.0;
    for (std::size_t u = 0; u < dim_; ++u) {
      for (std::size_t v = 0; v < dim_; ++v) {
        if (weight(u, v)) acc += m[u * dim_ + v];
      }
    }
    return acc;
  };
  std::vector<double> per_batch;
  per_batch.reserve(batch_means_.size());
  for (const auto& bm : batch_means_) per_batch.push_back(apply(bm));
  return {apply(mean_), batch_error(per_batch), samples_};
}

Estimate RankTable::at(std::uint64_t k, std::uint64_t l) const {
  if (k < n1_ || l < n1_ || k - n1_ >= dim_ || l - n1_ >= dim_) return {0.0, 0.0, samples_};
  const std::size_t u = k - n1_;
  const std::size_t v = l - n1_;
  return functional([&](std::size_t a, std::size_t b) { return a == u && b == v; });
}

Estimate RankTable::marginal_q(std::uint64_t k) const {
  if (k < n1_ || k - n1_ >= dim_) return {0.0, 0.0, samples_};
  const std::size_t u = k - n1_;
  return functional([&](std::size_t a, std::size_t) { return a == u; });
}

Estimate RankTable::marginal_r(std::uint64_t l) const {
  if (l < n1_ || l - n1_ >= dim_) return {0.0, 0.0, samples_};
  const std::size_t v = l - n1_;
  return functional([&](std::size_t, std::size_t b) { return b == v; });
}

Estimate RankTable::total() const {
  return functional([](std::size_t, std::size_t) { return true; });
}

RankTable p_kl_mc(Index n1, Index n2, std::uint64_t samples, std::uint64_t seed,
                  McConfig config) {
  check_quadrature_shape(n1, n2);
  if (n1 > kMaxJointN1) {
    throw GuardExceeded("joint rank table is limited to n1 <= " + std::to_string(kMaxJointN1));
  }
  const std::size_t deg = std::size_t{n1} * (n1 - 1);
  const std::size_t dim = deg + 1;
  const auto sizes = batch_sizes(samples, config.batches);
  std::vector<std::vector<double>> sums(sizes.size());
  parallel_for(sizes.size(), config.threads, [&](std::size_t b) {
    rng::Engine eng(rng::derive_seed(seed, rng::stream::kQuadrature + b));
    std::vector<double> x(n1);
    std::vector<double> y(n1);
    BivariatePoly poly(deg, deg);
    std::vector<double> acc(dim * dim, 0.0);
    for (std::uint64_t s = 0; s < sizes[b]; ++s) {
      for (auto& v : x) v = eng.uniform01();
      for (auto& v : y) v = eng.uniform01();
      fill_joint_poly(x, y, n2, poly);
      const auto c = poly.data();
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += c[k];
    }
    sums[b] = std::move(acc);
  });
  std::vector<double> mean(dim * dim, 0.0);
  std::vector<std::vector<double>> batch_means(sizes.size());
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    batch_means[b].resize(dim * dim);
    for (std::size_t k = 0; k < dim * dim; ++k) {
      mean[k] += sums[b][k];
      batch_means[b][k] = sums[b][k] / static_cast<double>(sizes[b]);
    }
  }
  for (auto& m : mean) m /= static_cast<double>(samples);
  return RankTable(n1, dim, std::move(mean), std::move(batch_means), samples);
}

namespace {

template <class Hit>
Estimate empirical_fraction(std::uint64_t trials, std::uint64_t seed, unsigned threads,
                            Hit&& hit) {
  if (trials == 0) throw std::domain_error("need at least one trial");
  constexpr std::size_t kChunks = 64;
  const auto sizes = batch_sizes(trials, kChunks);
  std::vector<std::uint64_t> starts(sizes.size(), 0);
  for (std::size_t c = 1; c < sizes.size(); ++c) starts[c] = starts[c - 1] + sizes[c - 1];
  std::vector<std::uint64_t> hits(sizes.size(), 0);
  parallel_for(sizes.size(), threads, [&](std::size_t c) {
    std::uint64_t h = 0;
    for (std::uint64_t t = starts[c]; t < starts[c] + sizes[c]; ++t) {
      if (hit(rng::derive_seed(seed, rng::stream::kTrial + t))) ++h;
    }
    hits[c] = h;
  });
  const auto total = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  const double p = static_cast<double>(total) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

Matching identity_matching(Index n1, Index n2) {
  std::vector<Index> wives(n1);
  std::iota(wives.begin(), wives.end(), Index{0});
  return Matching::from_wives(std::move(wives), n2);
}

}  // namespace

Estimate empirical_p_stable(Index n1, Index n2, std::uint64_t trials, std::uint64_t seed,
                            unsigned threads) {
  check_shape(n1, n2);
  const Matching identity = identity_matching(n1, n2);
  return empirical_fraction(trials, seed, threads, [&](std::uint64_t child) {
    return is_stable(gen_instance(n1, n2, child), identity);
  });
}

Estimate empirical_p_rotation(Index n1, Index n2, Index r, std::uint64_t trials,
                              std::uint64_t seed, unsigned threads) {
  check_shape(n1, n2);
  if (r < 2 || r > n1) throw std::domain_error("rotation length must lie in [2, n1]");
  const Matching identity = identity_matching(n1, n2);
  std::vector<Rotation::Pair> pairs;
  for (Index k = 0; k < r; ++k) pairs.emplace_back(k, k);
  const Rotation target(std::move(pairs));
  return empirical_fraction(trials, seed, threads, [&](std::uint64_t child) {
    const Instance inst = gen_instance(n1, n2, child);
    if (!is_stable(inst, identity)) return false;
    const auto exposed = exposed_rotations(inst, identity);
    return std::binary_search(exposed.begin(), exposed.end(), target);
  });
}

}  // namespace stablelab::quadrature

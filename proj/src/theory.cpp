#include "stablelab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "stablelab/rng.hpp"

namespace stablelab::theory {

namespace {

void require_unbalanced(MarketShape shape) {
  if (shape.n1 == 0) throw std::domain_error("n1 must be at least 1");
  if (shape.n2 <= shape.n1) throw std::domain_error("predictors need n2 > n1");
}

// s f(s) = (e^s - 1 - s) / (e^s - 1) = 1 - s / (e^s - 1).
double s_times_f(double s) { return s * f_of(s); }

}  // namespace

double s_of(MarketShape shape) {
  require_unbalanced(shape);
  // ln(n2 / (n2 - n1)) = -ln(1 - n1/n2)
  return -std::log1p(-static_cast<double>(shape.n1) / shape.n2);
}

double expected_stable_matchings(MarketShape shape) {
  const double s = s_of(shape);
  const double gap = static_cast<double>(shape.n2 - shape.n1);
  return shape.n1 * std::exp(-s_times_f(s)) / (gap * s);
}

double es_limit_near_balanced(MarketShape shape) {
  require_unbalanced(shape);
  if (shape.n1 < 2) throw std::domain_error("near-balanced limit needs n1 >= 2");
  const double gap = static_cast<double>(shape.n2 - shape.n1);
  return std::exp(-1.0) * shape.n1 / (gap * std::log(static_cast<double>(shape.n1)));
}

double lambda_of(double c) {
  if (!(c > 1.0)) throw std::domain_error("lambda(c) needs c > 1");
  return std::pow(c / (c - 1.0), c - 1.0);
}

double es_limit_ratio(double c) {
  const double lam = lambda_of(c);
  return std::exp(-1.0) * lam / std::log(lam);
}

double f_of(double x) {
  if (!(x > 0.0)) throw std::domain_error("f(x) needs x > 0");
  if (x < 0.1) {
    // 1/x - 1/(e^x - 1) = 1/2 - x/12 + x^3/720 - x^5/30240 + ...
    const double x2 = x * x;
    return 0.5 - x / 12.0 + x * x2 / 720.0 - x * x2 * x2 / 30240.0;
  }
  if (x < 1.0) {
    const double em1 = std::expm1(x);
    return (em1 - x) / (x * em1);
  }
  const double e = std::exp(-x);
  return (1.0 - (1.0 + x) * e) / (x * (1.0 - e));
}

Tolerances tolerances(MarketShape shape, ToleranceConfig config) {
  return tolerances_at(s_of(shape), shape.n1, config);
}

Tolerances tolerances_at(double s, Index n1, ToleranceConfig config) {
  if (!(config.a > 0.0 && config.a < 0.5) || !(config.b > 0.0 && config.b < 0.5)) {
    throw std::domain_error("tolerance exponents must lie in (0, 1/2)");
  }
  if (!(config.tau > 0.0)) throw std::domain_error("regime threshold must be positive");
  if (!(s > 0.0) || n1 == 0) throw std::domain_error("tolerances need s > 0 and n1 >= 1");
  Tolerances out;
  out.delta = s > config.tau ? std::pow(s, -config.b) : std::pow(static_cast<double>(n1), -config.a);
  out.delta_star = out.delta / s_times_f(s);
  return out;
}

double h_of_s(double s) {
  if (!(s > 0.0)) throw std::domain_error("h needs s > 0");
  return 2.0 - s / std::expm1(s);
}

double h_of(MarketShape shape) { return h_of_s(s_of(shape)); }

double coupon_mean(MarketShape shape) {
  require_unbalanced(shape);
  // Smallest terms first.
  double sum = 0.0;
  for (Index j = shape.n2; j > shape.n2 - shape.n1; --j) sum += 1.0 / j;
  return shape.n2 * sum;
}

double r_center(MarketShape shape) {
  const double n1 = shape.n1;
  return n1 * n1 * f_of(s_of(shape));
}

double q_center(MarketShape shape) { return shape.n2 * s_of(shape); }

Prediction predict(MarketShape shape, ToleranceConfig config) {
  Prediction p;
  p.shape = shape;
  p.s = s_of(shape);
  p.es = expected_stable_matchings(shape);
  p.q_center = q_center(shape);
  p.r_center = r_center(shape);
  const auto tol = tolerances(shape, config);
  p.delta = tol.delta;
  p.delta_star = tol.delta_star;
  p.h = h_of_s(p.s);
  p.coupon_mean = coupon_mean(shape);
  return p;
}

SpacingsStats spacings_stats(std::uint64_t n, std::uint64_t trials, std::uint64_t seed) {
  if (n < 2) throw std::domain_error("spacings need n >= 2");
  if (trials == 0) throw std::domain_error("spacings need at least one trial");
  const double nd = static_cast<double>(n);
  const double lplus_scale = std::log(nd) / nd;
  std::vector<double> cuts(n + 1);
  double sum_nT = 0.0;
  double sum_lplus = 0.0;
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    rng::Engine eng(rng::derive_seed(seed, rng::stream::kSpacings + t));
    cuts.front() = 0.0;
    cuts.back() = 1.0;
    for (std::uint64_t k = 1; k < n; ++k) cuts[k] = eng.uniform01();
    std::sort(cuts.begin() + 1, cuts.end() - 1);
    double t_n = 0.0;
    double l_max = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
      const double len = cuts[k + 1] - cuts[k];
      t_n += len * len;
      l_max = std::max(l_max, len);
    }
    sum_nT += nd * t_n;
    sum_lplus += l_max / lplus_scale;
    if (nd * t_n >= 3.0) ++hits;
  }
  const double td = static_cast<double>(trials);
  return {sum_nT / td, sum_lplus / td, static_cast<double>(hits) / td};
}

}  // namespace stablelab::theory

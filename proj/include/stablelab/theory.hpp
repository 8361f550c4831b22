#pragma once

#include <cstdint>

#include "stablelab/prefgen.hpp"

namespace stablelab::theory {

/// Market size (n1 men, n2 women). The asymptotic predictors below require
/// n2 > n1 >= 1 and throw std::domain_error otherwise.
struct MarketShape {
  Index n1 = 0;
  Index n2 = 0;

  friend bool operator==(const MarketShape&, const MarketShape&) = default;
};

/// s = ln(n2 / (n2 - n1)).
double s_of(MarketShape shape);

/// Leading-order E[S]: n1 exp(-(e^s - 1 - s)/(e^s - 1)) / ((n2 - n1) s).
double expected_stable_matchings(MarketShape shape);

/// Limit of E[S] when n2/n1 -> 1 (s -> infinity): e^-1 n1 / ((n2 - n1) ln n1).
/// Needs n1 >= 2.
double es_limit_near_balanced(MarketShape shape);

/// Limit of E[S] when n2/n1 -> infinity.
constexpr double es_limit_wide() noexcept { return 1.0; }

/// lambda(c) = (c / (c - 1))^(c - 1), c > 1.
double lambda_of(double c);

/// Limit of E[S] at fixed ratio n2/n1 -> c > 1: e^-1 lambda(c) / ln lambda(c).
double es_limit_ratio(double c);

/// f(x) = (e^x - 1 - x) / (x (e^x - 1)) for x > 0. Evaluated without
/// cancellation near 0 and without overflow for large x.
double f_of(double x);

/// f(0+) = 1/2.
constexpr double f_at_zero() noexcept { return 0.5; }

struct ToleranceConfig {
  double a = 0.4;    // exponent of n1 in the bounded-s regime
  double b = 0.4;    // exponent of s in the large-s regime
  double tau = 3.0;  // s above tau is treated as the large-s regime
};

struct Tolerances {
  double delta = 0.0;
  double delta_star = 0.0;
};

/// delta = s^-b if s > tau, else n1^-a; delta* = delta / (s f(s)).
/// Throws std::domain_error unless 0 < a, b < 1/2 and tau > 0.
Tolerances tolerances(MarketShape shape, ToleranceConfig config = {});

/// Same rule for an explicit s > 0 and n1.
Tolerances tolerances_at(double s, Index n1, ToleranceConfig config = {});

/// h = 2 - s / (e^s - 1).
double h_of(MarketShape shape);
double h_of_s(double s);

/// Exact coupon-collector mean n2 (H_{n2} - H_{n2 - n1}).
double coupon_mean(MarketShape shape);

/// Concentration point of R over stable matchings: n1^2 f(s).
double r_center(MarketShape shape);

/// Concentration point of Q over stable matchings: n2 s.
double q_center(MarketShape shape);

struct Prediction {
  MarketShape shape;
  double s = 0.0;
  double es = 0.0;
  double q_center = 0.0;
  double r_center = 0.0;
  double delta = 0.0;
  double delta_star = 0.0;
  double h = 0.0;
  double coupon_mean = 0.0;
};

Prediction predict(MarketShape shape, ToleranceConfig config = {});

struct SpacingsStats {
  double mean_nTn = 0.0;
  double mean_Lplus_scaled = 0.0;
  double p_nTn_ge_3 = 0.0;
};

/// Monte Carlo over partitions of [0, 1] by n - 1 uniform points into n
/// spacings L_1..L_n. Reports the mean of n * sum L_j^2, the mean of
/// max L_j / (ln n / n), and the frequency of n * sum L_j^2 >= 3.
SpacingsStats spacings_stats(std::uint64_t n, std::uint64_t trials, std::uint64_t seed);

}  // namespace stablelab::theory

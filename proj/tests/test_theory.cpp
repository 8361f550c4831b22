#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stablelab/theory.hpp"

using namespace stablelab;
using namespace stablelab::theory;

namespace {

// Direct long-double evaluation, fine away from 0 and infinity.
long double f_direct(long double x) {
  const long double ex = std::exp(x);
  return (ex - 1.0L - x) / (x * (ex - 1.0L));
}

long double harmonic(std::uint64_t n) {
  long double h = 0.0L;
  for (std::uint64_t k = n; k >= 1; --k) h += 1.0L / static_cast<long double>(k);
  return h;
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("s_of") {
  CHECK(s_of({1, 2}) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(s_of({100, 200}) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(s_of({1000, 1001}) == doctest::Approx(std::log(1001.0)).epsilon(1e-14));
  CHECK(s_of({1000, 1001}) == doctest::Approx(6.9088).epsilon(1e-4));
  CHECK_THROWS_AS(s_of({5, 5}), std::domain_error);
  CHECK_THROWS_AS(s_of({6, 5}), std::domain_error);
  CHECK_THROWS_AS(s_of({0, 5}), std::domain_error);
  for (Index n1 = 1; n1 <= 60; n1 += 7) {
    for (Index n2 = n1 + 1; n2 <= 200; n2 += 13) {
      CHECK(s_of({n1, n2}) >= static_cast<double>(n1) / n2);
    }
  }
}

TEST_CASE("f_of") {
  CHECK(f_at_zero() == 0.5);
  CHECK(f_of(1e-12) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f_of(1e-4) == doctest::Approx(0.5 - 1e-4 / 12).epsilon(1e-12));
  CHECK(f_of(700.0) == doctest::Approx(1.0 / 700.0).epsilon(1e-12));
  CHECK(std::isfinite(f_of(1e6)));
  CHECK(f_of(1e6) == doctest::Approx(1e-6).epsilon(1e-5));
  CHECK_THROWS_AS(f_of(0.0), std::domain_error);
  CHECK_THROWS_AS(f_of(-1.0), std::domain_error);
  CHECK_THROWS_AS(f_of(std::nan("")), std::domain_error);

  for (double x : {0.05, 0.099, 0.1, 0.5, 0.999, 1.0, 2.0, std::log(11.0), std::log(21.0), 10.0, 30.0}) {
    CHECK(f_of(x) == doctest::Approx(static_cast<double>(f_direct(x))).epsilon(1e-12));
  }
  CHECK(f_of(std::log(21.0)) == doctest::Approx(0.2787).epsilon(1e-3));
  CHECK(f_of(std::log(11.0)) == doctest::Approx(0.31703).epsilon(1e-4));

  double prev = f_of(1e-6);
  for (double x = 1e-3; x < 200.0; x *= 1.05) {
    const double cur = f_of(x);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("expected_stable_matchings and its limits") {
  CHECK(lambda_of(2.0) == doctest::Approx(2.0));
  CHECK(es_limit_ratio(2.0) == doctest::Approx(2.0 / (std::numbers::e * std::numbers::ln2)));
  CHECK(es_limit_ratio(2.0) == doctest::Approx(1.0615).epsilon(1e-4));
  CHECK(es_limit_wide() == 1.0);
  CHECK_THROWS_AS(lambda_of(1.0), std::domain_error);

  const double near = es_limit_near_balanced({1000, 1001});
  CHECK(near == doctest::Approx(1000.0 / (std::numbers::e * std::log(1000.0))));
  CHECK(near == doctest::Approx(53.3).epsilon(2e-3));
  const double main = expected_stable_matchings({1000, 1001});
  CHECK(main == doctest::Approx(53.6).epsilon(2e-3));
  CHECK(std::abs(main / near - 1.0) < 0.01);
  CHECK_THROWS_AS(expected_stable_matchings({3, 3}), std::domain_error);
  CHECK_THROWS_AS(es_limit_near_balanced({1, 2}), std::domain_error);

  // Pointwise identity at fixed ratio.
  for (double c : {1.1, 1.5, 2.0, 4.0, 10.0}) {
    const Index n1 = 1000;
    const auto n2 = static_cast<Index>(std::lround(c * n1));
    const MarketShape shape{n1, n2};
    const double s = s_of(shape);
    const double scale = n1 / ((n2 - n1) * s);
    const double expected = std::exp(-(std::expm1(s) - s) / std::expm1(s));
    CHECK(expected_stable_matchings(shape) / scale == doctest::Approx(expected).epsilon(1e-12));
  }

  // Ratio limit approached along n2 = 2 n1.
  CHECK(expected_stable_matchings({1'000'000, 2'000'000}) == doctest::Approx(es_limit_ratio(2.0)).epsilon(1e-5));
  // Wide regime approaches 1.
  CHECK(expected_stable_matchings({10, 10'000'000}) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("tolerances") {
  const double s4 = 4.0;
  const auto t_large = tolerances_at(s4, 100, {});
  CHECK(t_large.delta == doctest::Approx(std::pow(4.0, -0.4)));
  CHECK(t_large.delta == doctest::Approx(0.574).epsilon(1e-3));
  CHECK(t_large.delta_star * s4 * f_of(s4) == doctest::Approx(t_large.delta).epsilon(1e-15));

  const auto t_small = tolerances({10'000, 20'000});
  CHECK(t_small.delta == doctest::Approx(std::pow(10.0, -1.6)));
  CHECK(t_small.delta == doctest::Approx(0.0251).epsilon(1e-3));
  const double s = s_of({10'000, 20'000});
  CHECK(t_small.delta_star * s * f_of(s) == doctest::Approx(t_small.delta).epsilon(1e-15));

  // tau is configurable.
  CHECK(tolerances_at(4.0, 100, {0.4, 0.4, 5.0}).delta == doctest::Approx(std::pow(100.0, -0.4)));

  CHECK_THROWS_AS(tolerances({10, 20}, {0.5, 0.4, 3.0}), std::domain_error);
  CHECK_THROWS_AS(tolerances({10, 20}, {0.4, 0.0, 3.0}), std::domain_error);
  CHECK_THROWS_AS(tolerances({10, 20}, {0.4, 0.4, 0.0}), std::domain_error);
  CHECK_THROWS_AS(tolerances({10, 10}), std::domain_error);
}

TEST_CASE("h_of") {
  CHECK(h_of_s(1e-12) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(h_of_s(800.0) == doctest::Approx(2.0));
  CHECK(h_of({1, 2}) == doctest::Approx(2.0 - std::numbers::ln2));
  CHECK(h_of({1, 2}) == doctest::Approx(1.3069).epsilon(1e-4));
}

TEST_CASE("coupon_mean") {
  for (Index n2 = 2; n2 <= 50; ++n2) CHECK(coupon_mean({1, n2}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(coupon_mean({2, 3}) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(coupon_mean({5, 100'000'000}) == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(coupon_mean({200, 201}) == doctest::Approx(static_cast<double>(201.0L * (harmonic(201) - 1.0L))).epsilon(1e-13));
  // Ratio to n2 s tends to 1 at fixed ratio.
  for (double c : {1.5, 2.0, 3.0}) {
    const Index n1 = 100'000;
    const auto n2 = static_cast<Index>(c * n1);
    CHECK(std::abs(coupon_mean({n1, n2}) / q_center({n1, n2}) - 1.0) < 0.01);
  }
}

TEST_CASE("predict") {
  const MarketShape shape{1000, 1100};
  const auto p = predict(shape);
  CHECK(p.shape == shape);
  CHECK(p.s == s_of(shape));
  CHECK(p.es == expected_stable_matchings(shape));
  CHECK(p.q_center == doctest::Approx(1100.0 * std::log(11.0)));
  CHECK(p.q_center == doctest::Approx(2638).epsilon(1e-3));
  CHECK(p.r_center == doctest::Approx(1e6 * f_of(std::log(11.0))));
  CHECK(p.h == h_of(shape));
  CHECK(p.coupon_mean == coupon_mean(shape));
  for (double v : {p.s, p.es, p.q_center, p.r_center, p.delta, p.delta_star, p.h, p.coupon_mean}) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
  CHECK_THROWS_AS(predict({4, 4}), std::domain_error);
}

TEST_CASE("spacings_stats") {
  // n = 2: E[2 T_2] = 4/3, and 2 T_2 <= 2 < 3 always.
  const auto two = spacings_stats(2, 200'000, 11);
  CHECK(two.mean_nTn == doctest::Approx(4.0 / 3.0).epsilon(0.005));
  CHECK(two.p_nTn_ge_3 == 0.0);

  const auto big = spacings_stats(10'000, 200, 5);
  CHECK(big.mean_nTn >= 1.9);
  CHECK(big.mean_nTn <= 2.1);
  CHECK(big.p_nTn_ge_3 <= 0.01);
  CHECK(big.mean_Lplus_scaled >= 0.85);
  CHECK(big.mean_Lplus_scaled <= 1.15);

  const auto again = spacings_stats(10'000, 200, 5);
  CHECK(again.mean_nTn == big.mean_nTn);
  CHECK(again.mean_Lplus_scaled == big.mean_Lplus_scaled);

  CHECK_THROWS_AS(spacings_stats(1, 10, 0), std::domain_error);
  CHECK_THROWS_AS(spacings_stats(10, 0, 0), std::domain_error);
}

}  // TEST_SUITE

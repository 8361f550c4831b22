#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "stablelab/engine.hpp"
#include "stablelab/expsuite.hpp"
#include "stablelab/lattice.hpp"

using namespace stablelab;
using namespace stablelab::expsuite;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("stablelab_test_" + name);
  std::filesystem::remove(p);
  return p;
}

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

}  // namespace

TEST_SUITE("expsuite") {

TEST_CASE("default mode switch") {
  CHECK(default_mode(1) == Mode::Enumerate);
  CHECK(default_mode(1999) == Mode::Enumerate);
  CHECK(default_mode(2000) == Mode::ExtremesOnly);
  ExperimentConfig cfg;
  cfg.n1 = 5000;
  CHECK(cfg.effective_mode() == Mode::ExtremesOnly);
  cfg.mode = Mode::Enumerate;
  CHECK(cfg.effective_mode() == Mode::Enumerate);
}

TEST_CASE("summarize") {
  const auto f = summarize({5, 1, 4, 2, 3});
  CHECK(f.count == 5);
  CHECK(f.mean == 3.0);
  CHECK(f.std == doctest::Approx(std::sqrt(2.5)));
  CHECK(f.min == 1.0);
  CHECK(f.max == 5.0);
  CHECK(f.p05 == doctest::Approx(1.2));
  CHECK(f.p25 == 2.0);
  CHECK(f.p50 == 3.0);
  CHECK(f.p75 == 4.0);
  CHECK(f.p95 == doctest::Approx(4.8));
  const auto empty = summarize({});
  CHECK(empty.count == 0);
  CHECK(empty.mean == 0.0);
  const auto one = summarize({7});
  CHECK(one.std == 0.0);
  CHECK(one.p95 == 7.0);
}

TEST_CASE("single man experiment") {
  ExperimentConfig cfg;
  cfg.n1 = 1;
  cfg.n2 = 5;
  cfg.trials = 100;
  cfg.seed = 3;
  const auto report = run_experiment(cfg);
  REQUIRE(report.trials.size() == 100);
  CHECK(report.completed == 100);
  CHECK(report.censored == 0);
  for (const auto& t : report.trials) {
    CHECK(t.s == 1u);
    CHECK(t.q_min == 1);
    CHECK(t.q_max == 1);
    CHECK(t.proposals_men == 1);
    CHECK(t.total_rotation_length == 0u);
  }
  REQUIRE(report.prediction.has_value());
  for (const char* name : {"ES_RATIO", "Q_CONC", "R_CONC", "MULT_FRAC", "COUPON", "WOMEN_SET", "STRUCTURE"}) {
    INFO(name);
    REQUIRE(report.verdict(name) != nullptr);
    CHECK(report.verdict(name)->passed);
  }
  CHECK(report.passed());
  CHECK(report.aggregate("S")->count == 100);
  CHECK(report.aggregate("nope") == nullptr);
}

TEST_CASE("trial records agree with brute force") {
  for (std::uint64_t t = 0; t < 200; ++t) {
    const Index n1 = 2 + t % 4;
    const Index n2 = n1 + t % 3;
    const auto seed = trial_seed(17, t);
    const auto rec = run_trial(n1, n2, seed, Mode::Enumerate, 1'000'000);
    const auto inst = gen_instance(n1, n2, seed);
    const auto bf = brute_force_all(inst);
    REQUIRE(rec.s == bf.size());
    std::uint64_t q_lo = UINT64_MAX, q_hi = 0, r_lo = UINT64_MAX, r_hi = 0;
    for (const auto& m : bf.matchings) {
      const auto rp = ranks(inst, m);
      q_lo = std::min(q_lo, rp.q);
      q_hi = std::max(q_hi, rp.q);
      r_lo = std::min(r_lo, rp.r);
      r_hi = std::max(r_hi, rp.r);
    }
    CHECK(rec.q_min == q_lo);
    CHECK(rec.q_max == q_hi);
    CHECK(rec.r_min == r_lo);
    CHECK(rec.r_max == r_hi);
    const auto mult = multiplicity(bf);
    CHECK(rec.m_frac == mult.m_frac);
    CHECK(rec.w_frac == mult.w_frac);
    CHECK(rec.total_rotation_length == mult.total_rotation_length);
    CHECK(rec.proposals_men == rec.q_min);
    CHECK(rec.women_set_invariant);
    CHECK(rec.extremes_consistent);
    CHECK_FALSE(rec.censored);
  }
}

TEST_CASE("extremes-only mode matches enumeration on shared fields") {
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto seed = trial_seed(99, t);
    const auto full = run_trial(40, 44, seed, Mode::Enumerate, 1'000'000);
    const auto fast = run_trial(40, 44, seed, Mode::ExtremesOnly, 1'000'000);
    CHECK_FALSE(fast.s.has_value());
    CHECK_FALSE(fast.total_rotation_length.has_value());
    CHECK(fast.q_min == full.q_min);
    CHECK(fast.q_max == full.q_max);
    CHECK(fast.r_min == full.r_min);
    CHECK(fast.r_max == full.r_max);
    CHECK(fast.m_frac == full.m_frac);
    CHECK(fast.w_frac == full.w_frac);
    CHECK(fast.proposals_men == full.proposals_men);
  }
}

TEST_CASE("censored trials are counted, not dropped") {
  ExperimentConfig cfg;
  cfg.n1 = 8;
  cfg.n2 = 8;
  cfg.trials = 60;
  cfg.seed = 1;
  cfg.cap = 1;
  const auto report = run_experiment(cfg);
  CHECK(report.trials.size() == 60);
  CHECK(report.censored > 0);
  CHECK(report.completed + report.censored == 60);
  CHECK(report.aggregate("S")->count == report.completed);
  CHECK(report.aggregate("q_min")->count == 60);
  CHECK_FALSE(report.prediction.has_value());
  CHECK(report.verdict("ES_RATIO") == nullptr);
  CHECK(report.verdict("STRUCTURE")->passed);
}

TEST_CASE("reproducible for any thread count") {
  ExperimentConfig cfg;
  cfg.n1 = 30;
  cfg.n2 = 32;
  cfg.trials = 40;
  cfg.seed = 5;
  cfg.threads = 1;
  const auto a = run_experiment(cfg);
  cfg.threads = 4;
  const auto b = run_experiment(cfg);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) CHECK(a.trials[i].same_outcome(b.trials[i]));
  CHECK(a.aggregate("S")->mean == b.aggregate("S")->mean);
  CHECK(a.aggregate("r_max")->p95 == b.aggregate("r_max")->p95);
  CHECK(csv_row(a) == csv_row(b));
  cfg.seed = 6;
  const auto c = run_experiment(cfg);
  CHECK_FALSE(c.trials[0].same_outcome(a.trials[0]));
}

TEST_CASE("verify flags broken records") {
  ExperimentConfig cfg;
  cfg.n1 = 10;
  cfg.n2 = 12;
  cfg.trials = 20;
  auto report = run_experiment(cfg);
  CHECK(report.verdict("STRUCTURE")->passed);
  report.trials[3].extremes_consistent = false;
  report.trials[4].women_set_invariant = false;
  const auto v = verify(report);
  auto find = [&](const std::string& name) {
    return *std::find_if(v.begin(), v.end(), [&](const Verdict& x) { return x.name == name; });
  };
  CHECK_FALSE(find("STRUCTURE").passed);
  CHECK(find("STRUCTURE").observed == 1.0);
  CHECK_FALSE(find("WOMEN_SET").passed);

  // Tightening the coupon slack below 1 fails the check.
  report.config.coupon_slack = 0.5;
  const auto v2 = verify(report);
  CHECK_FALSE(std::find_if(v2.begin(), v2.end(), [](const Verdict& x) { return x.name == "COUPON"; })->passed);
}

TEST_CASE("R concentration is informational past n1^1.5") {
  ExperimentConfig cfg;
  cfg.n1 = 4;
  cfg.n2 = 9;
  cfg.trials = 5;
  const auto report = run_experiment(cfg);
  CHECK_FALSE(report.verdict("R_CONC")->gating);
  cfg.n2 = 8;
  CHECK(run_experiment(cfg).verdict("R_CONC")->gating);
}

TEST_CASE("invalid configurations") {
  ExperimentConfig cfg;
  cfg.n1 = 5;
  cfg.n2 = 4;
  CHECK_THROWS_AS(run_experiment(cfg), std::domain_error);
  cfg.n2 = 5;
  cfg.trials = 0;
  CHECK_THROWS_AS(run_experiment(cfg), std::domain_error);
}

TEST_CASE("sweep") {
  SUBCASE("empty grid") {
    const auto path = temp_file("empty.jsonl");
    const auto res = sweep({}, 10, 1, path);
    CHECK(res.ran.empty());
    CHECK(line_count(path) == 0);
    std::filesystem::remove(path);
  }
  SUBCASE("three shapes, then resume") {
    const auto path = temp_file("grid.jsonl");
    const std::vector<theory::MarketShape> grid{{100, 101}, {100, 110}, {100, 200}};
    const auto res = sweep(grid, 5, 2, path);
    REQUIRE(res.ran.size() == 3);
    CHECK(line_count(path) == 3);
    CHECK(res.ran[0].prediction->es > res.ran[1].prediction->es);
    CHECK(res.ran[1].prediction->es > res.ran[2].prediction->es);
    CHECK(res.ran[1].config.seed == shape_seed(2, {100, 110}));

    const auto again = sweep(grid, 5, 2, path);
    CHECK(again.ran.empty());
    CHECK(again.skipped.size() == 3);
    CHECK(line_count(path) == 3);

    // A partial run followed by a resume reproduces the uninterrupted one.
    const auto partial = temp_file("partial.jsonl");
    sweep({grid[0]}, 5, 2, partial);
    const auto rest = sweep(grid, 5, 2, partial);
    REQUIRE(rest.ran.size() == 2);
    CHECK(rest.ran[0].trials[0].same_outcome(res.ran[1].trials[0]));
    CHECK(csv_row(rest.ran[1]) == csv_row(res.ran[2]));
    std::filesystem::remove(path);
    std::filesystem::remove(partial);
  }
}

TEST_CASE("csv layout") {
  CHECK(csv_header() ==
        "n1,n2,trials,mean_S,pred_S,mean_qmin,mean_qmax,q_center,mean_rmin,mean_rmax,"
        "r_center,m_frac,w_frac,coupon_mean,mean_proposals");
  ExperimentConfig cfg;
  cfg.n1 = 3;
  cfg.n2 = 4;
  cfg.trials = 3;
  const auto row = csv_row(run_experiment(cfg));
  CHECK(std::count(row.begin(), row.end(), ',') == 14);
  CHECK(row.rfind("3,4,3,", 0) == 0);
}

}  // TEST_SUITE

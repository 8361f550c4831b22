#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stablelab/prefgen.hpp"
#include "stablelab/theory.hpp"

namespace stablelab::expsuite {

enum class Mode { Enumerate, ExtremesOnly };

/// Enumerate below n1 = 2000, extremes only from there on.
Mode default_mode(Index n1) noexcept;

struct ExperimentConfig {
  Index n1 = 1;
  Index n2 = 1;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<Mode> mode;  // default_mode(n1) when unset
  unsigned threads = 0;
  std::size_t cap = 1'000'000;

  theory::ToleranceConfig tolerance;
  double q_tolerance = 0.15;         // band around n2 s for every stable Q
  double r_tolerance = 0.15;         // scaled by max(1, delta*) for R
  double conc_fail_fraction = 0.05;  // trials allowed outside the band
  double es_band = 0.30;             // mean S / predicted E[S] within 1 +/- band
  double mult_threshold = 0.10;      // mean multiplicity fractions
  double coupon_slack = 1.02;        // mean proposals <= slack * E[N]

  Mode effective_mode() const noexcept { return mode.value_or(default_mode(n1)); }
};

/// Outcome of one random instance.
struct TrialRecord {
  std::uint64_t seed = 0;
  Index n1 = 0;
  Index n2 = 0;
  std::optional<std::uint64_t> s;  // set only when the stable set was enumerated
  std::uint64_t q_min = 0;
  std::uint64_t q_max = 0;
  std::uint64_t r_min = 0;
  std::uint64_t r_max = 0;
  std::uint64_t proposals_men = 0;
  double m_frac = 0.0;
  double w_frac = 0.0;
  std::optional<std::uint64_t> total_rotation_length;
  bool censored = false;
  bool women_set_invariant = true;
  /// q_min, r_max come from the men-optimal matching, q_max, r_min from the
  /// women-optimal one, and the men's proposal count equals Q(M1).
  bool extremes_consistent = true;
  double wall_time = 0.0;  // seconds

  /// Equality of everything except wall time.
  bool same_outcome(const TrialRecord& other) const;
};

struct FieldSummary {
  std::uint64_t count = 0;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  double p05 = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
};

/// Summary statistics with linearly interpolated quantiles. Empty input
/// gives count 0 and zeros elsewhere.
FieldSummary summarize(std::vector<double> values);

struct Verdict {
  std::string name;
  bool passed = false;
  bool gating = true;  // informational checks never fail a report
  double observed = 0.0;
  double predicted = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ExperimentReport {
  ExperimentConfig config;
  Mode mode = Mode::Enumerate;
  std::vector<TrialRecord> trials;
  std::uint64_t completed = 0;
  std::uint64_t censored = 0;
  std::vector<std::pair<std::string, FieldSummary>> aggregates;
  std::optional<theory::Prediction> prediction;
  std::vector<Verdict> verdicts;

  const FieldSummary* aggregate(std::string_view field) const;
  const Verdict* verdict(std::string_view name) const;
  /// All gating verdicts passed.
  bool passed() const;
};

/// Child seed of trial t: derive_seed(seed, trial stream + t).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t) noexcept;

/// Runs one trial on gen_instance(n1, n2, child_seed).
TrialRecord run_trial(Index n1, Index n2, std::uint64_t child_seed, Mode mode, std::size_t cap);

/// Runs all trials (in parallel), folds aggregates in trial order, attaches
/// the theory prediction when n2 > n1, and evaluates verify().
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Named checks: ES_RATIO, Q_CONC, R_CONC, MULT_FRAC, COUPON, WOMEN_SET and
/// STRUCTURE. Checks that need a prediction are omitted when n2 == n1.
std::vector<Verdict> verify(const ExperimentReport& report);

struct SweepResult {
  std::vector<ExperimentReport> ran;
  std::vector<theory::MarketShape> skipped;
};

/// Runs each shape not already present in `output` and appends one JSON
/// report per line. The per-shape seed is derived from (seed, n1, n2), so
/// resuming a partial sweep reproduces the uninterrupted one.
SweepResult sweep(const std::vector<theory::MarketShape>& grid, std::uint64_t trials,
                  std::uint64_t seed, const std::filesystem::path& output,
                  const ExperimentConfig& base = {});

/// Seed used by sweep() for one shape.
std::uint64_t shape_seed(std::uint64_t seed, theory::MarketShape shape) noexcept;

/// CSV summary with a fixed column order.
std::string csv_header();
std::string csv_row(const ExperimentReport& report);

}  // namespace stablelab::expsuite

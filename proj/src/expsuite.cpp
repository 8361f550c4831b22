#include "stablelab/expsuite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "stablelab/engine.hpp"
#include "stablelab/io.hpp"
#include "stablelab/lattice.hpp"
#include "stablelab/parallel.hpp"
#include "stablelab/rng.hpp"

namespace stablelab::expsuite {

Mode default_mode(Index n1) noexcept { return n1 < 2000 ? Mode::Enumerate : Mode::ExtremesOnly; }

bool TrialRecord::same_outcome(const TrialRecord& o) const {
  return seed == o.seed && n1 == o.n1 && n2 == o.n2 && s == o.s && q_min == o.q_min &&
         q_max == o.q_max && r_min == o.r_min && r_max == o.r_max &&
         proposals_men == o.proposals_men && m_frac == o.m_frac && w_frac == o.w_frac &&
         total_rotation_length == o.total_rotation_length && censored == o.censored &&
         women_set_invariant == o.women_set_invariant &&
         extremes_consistent == o.extremes_consistent;
}

FieldSummary summarize(std::vector<double> values) {
  FieldSummary f;
  f.count = values.size();
  if (values.empty()) return f;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  f.mean = sum / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - f.mean) * (v - f.mean);
  f.std = values.size() > 1 ? std::sqrt(ss / (values.size() - 1)) : 0.0;
  f.min = values.front();
  f.max = values.back();
  auto quantile = [&](double p) {
    const double pos = p * (values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - lo) * (values[hi] - values[lo]);
  };
  f.p05 = quantile(0.05);
  f.p25 = quantile(0.25);
  f.p50 = quantile(0.50);
  f.p75 = quantile(0.75);
  f.p95 = quantile(0.95);
  return f;
}

const FieldSummary* ExperimentReport::aggregate(std::string_view field) const {
  for (const auto& [name, f] : aggregates) {
    if (name == field) return &f;
  }
  return nullptr;
}

const Verdict* ExperimentReport::verdict(std::string_view name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

bool ExperimentReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.passed || !v.gating; });
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t) noexcept {
  return rng::derive_seed(seed, rng::stream::kTrial + t);
}

namespace {

// Fills the rank extremes and multiplicity fractions from the two
// side-optimal matchings alone. A man has a unique stable partner iff his
// partners in M1 and M2 coincide, and the same holds for women.
void fill_from_extremes(TrialRecord& rec, const Instance& inst, const ProposalResult& men,
                        const ProposalResult& women) {
  rec.q_min = men.ranks.q;
  rec.r_max = men.ranks.r;
  rec.q_max = women.ranks.q;
  rec.r_min = women.ranks.r;
  std::size_t men_multi = 0;
  for (Index m = 0; m < inst.n1(); ++m) {
    if (men.matching.wife_of[m] != women.matching.wife_of[m]) ++men_multi;
  }
  std::size_t women_multi = 0;
  for (Index w = 0; w < inst.n2(); ++w) {
    if (men.matching.husband_of[w] != women.matching.husband_of[w]) ++women_multi;
  }
  rec.m_frac = static_cast<double>(men_multi) / inst.n1();
  rec.w_frac = static_cast<double>(women_multi) / inst.n2();
  rec.women_set_invariant = men.matching.matched_women() == women.matching.matched_women();
  rec.extremes_consistent = men.ranks.proposals == men.ranks.q && men.ranks.q <= women.ranks.q &&
                            men.ranks.r >= women.ranks.r;
}

}  // namespace

TrialRecord run_trial(Index n1, Index n2, std::uint64_t child_seed, Mode mode, std::size_t cap) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.seed = child_seed;
  rec.n1 = n1;
  rec.n2 = n2;

  const Instance inst = gen_instance(n1, n2, child_seed);
  const ProposalResult men = propose(inst, Side::Men);
  const ProposalResult women = propose(inst, Side::Women);
  rec.proposals_men = *men.ranks.proposals;
  fill_from_extremes(rec, inst, men, women);

  if (mode == Mode::Enumerate) {
    try {
      const StableSet ss = enumerate_all(inst, EnumerateOptions{cap});
      rec.s = ss.size();
      std::uint64_t q_lo = UINT64_MAX, q_hi = 0, r_lo = UINT64_MAX, r_hi = 0;
      const auto women_set = men.matching.matched_women();
      for (const auto& m : ss.matchings) {
        const auto rp = ranks(inst, m);
        q_lo = std::min(q_lo, rp.q);
        q_hi = std::max(q_hi, rp.q);
        r_lo = std::min(r_lo, rp.r);
        r_hi = std::max(r_hi, rp.r);
        if (m.matched_women() != women_set) rec.women_set_invariant = false;
      }
      rec.extremes_consistent = rec.extremes_consistent && q_lo == rec.q_min &&
                                q_hi == rec.q_max && r_lo == rec.r_min && r_hi == rec.r_max &&
                                ss.men_optimal_matching() == men.matching &&
                                ss.women_optimal_matching() == women.matching;
      const auto mult = multiplicity(ss);
      rec.extremes_consistent =
          rec.extremes_consistent && mult.m_frac == rec.m_frac && mult.w_frac == rec.w_frac;
      rec.total_rotation_length = mult.total_rotation_length;
    } catch (const EnumerationCapExceeded&) {
      rec.censored = true;
    }
  }
  rec.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

namespace {

void add_aggregate(ExperimentReport& report, const std::string& name, auto&& get) {
  std::vector<double> values;
  for (const auto& t : report.trials) {
    if (auto v = get(t)) values.push_back(*v);
  }
  report.aggregates.emplace_back(name, summarize(std::move(values)));
}

double max_deviation(std::uint64_t lo, std::uint64_t hi, double center) {
  return std::max(std::abs(lo / center - 1.0), std::abs(hi / center - 1.0));
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  check_shape(config.n1, config.n2);
  if (config.trials == 0) throw std::domain_error("need at least one trial");
  ExperimentReport report;
  report.config = config;
  report.mode = config.effective_mode();
  report.trials.resize(config.trials);
  parallel_for(config.trials, config.threads, [&](std::size_t t) {
    report.trials[t] =
        run_trial(config.n1, config.n2, trial_seed(config.seed, t), report.mode, config.cap);
  });
  for (const auto& t : report.trials) {
    if (t.censored) {
      ++report.censored;
    } else {
      ++report.completed;
    }
  }

  using Opt = std::optional<double>;
  auto done = [](const TrialRecord& t) { return !t.censored; };
  add_aggregate(report, "S", [&](const TrialRecord& t) -> Opt {
    return t.s ? Opt(static_cast<double>(*t.s)) : std::nullopt;
  });
  add_aggregate(report, "q_min", [](const TrialRecord& t) -> Opt { return double(t.q_min); });
  add_aggregate(report, "q_max", [](const TrialRecord& t) -> Opt { return double(t.q_max); });
  add_aggregate(report, "r_min", [](const TrialRecord& t) -> Opt { return double(t.r_min); });
  add_aggregate(report, "r_max", [](const TrialRecord& t) -> Opt { return double(t.r_max); });
  add_aggregate(report, "proposals_men",
                [](const TrialRecord& t) -> Opt { return double(t.proposals_men); });
  add_aggregate(report, "m_frac", [](const TrialRecord& t) -> Opt { return t.m_frac; });
  add_aggregate(report, "w_frac", [](const TrialRecord& t) -> Opt { return t.w_frac; });
  add_aggregate(report, "total_rotation_length", [&](const TrialRecord& t) -> Opt {
    return done(t) && t.total_rotation_length
               ? Opt(static_cast<double>(*t.total_rotation_length))
               : std::nullopt;
  });

  if (config.n2 > config.n1) {
    report.prediction = theory::predict({config.n1, config.n2}, config.tolerance);
  }
  report.verdicts = verify(report);
  return report;
}

std::vector<Verdict> verify(const ExperimentReport& report) {
  const auto& cfg = report.config;
  const double trials = static_cast<double>(report.trials.size());
  std::vector<Verdict> out;

  if (report.prediction) {
    const auto& pred = *report.prediction;
    if (report.mode == Mode::Enumerate && report.completed > 0) {
      const double mean_s = report.aggregate("S")->mean;
      Verdict v{"ES_RATIO", false, true, mean_s, pred.es, cfg.es_band,
                "mean stable-set size vs leading-order E[S]"};
      v.passed = std::abs(mean_s / pred.es - 1.0) <= cfg.es_band;
      out.push_back(v);
    }

    std::size_t q_out = 0;
    std::size_t r_out = 0;
    const double r_tol = cfg.r_tolerance * std::max(1.0, pred.delta_star);
    for (const auto& t : report.trials) {
      if (max_deviation(t.q_min, t.q_max, pred.q_center) > cfg.q_tolerance) ++q_out;
      if (max_deviation(t.r_min, t.r_max, pred.r_center) > r_tol) ++r_out;
    }
    Verdict q{"Q_CONC", false, true, q_out / trials, pred.q_center, cfg.q_tolerance,
              "fraction of trials with some stable Q outside (1 +/- tolerance) * n2 s"};
    q.passed = q.observed <= cfg.conc_fail_fraction;
    out.push_back(q);

    // Outside n2 <= n1^(3/2) the R concentration is reported, not gated.
    const bool r_gating = static_cast<double>(cfg.n2) <= std::pow(double(cfg.n1), 1.5);
    Verdict r{"R_CONC", false, r_gating, r_out / trials, pred.r_center, r_tol,
              "fraction of trials with some stable R outside (1 +/- tolerance) * n1^2 f(s)"};
    r.passed = r.observed <= cfg.conc_fail_fraction;
    out.push_back(r);

    const double m_mean = report.aggregate("m_frac")->mean;
    const double w_mean = report.aggregate("w_frac")->mean;
    const double gap = static_cast<double>(cfg.n2 - cfg.n1);
    Verdict mult{"MULT_FRAC", false, gap * gap >= cfg.n1, std::max(m_mean, w_mean), 0.0,
                 cfg.mult_threshold, "larger of mean m_frac and mean w_frac"};
    mult.passed = m_mean <= cfg.mult_threshold && w_mean <= cfg.mult_threshold;
    out.push_back(mult);

    const double proposals = report.aggregate("proposals_men")->mean;
    Verdict coupon{"COUPON", false, true, proposals, pred.coupon_mean, cfg.coupon_slack,
                   "mean men-proposing proposal count vs slack * E[N]"};
    coupon.passed = proposals <= cfg.coupon_slack * pred.coupon_mean;
    out.push_back(coupon);
  }

  const auto women_bad = std::count_if(report.trials.begin(), report.trials.end(),
                                       [](const TrialRecord& t) { return !t.women_set_invariant; });
  out.push_back({"WOMEN_SET", women_bad == 0, true, static_cast<double>(women_bad), 0.0, 0.0,
                 "trials whose stable matchings do not share one matched-women set"});
  const auto structure_bad =
      std::count_if(report.trials.begin(), report.trials.end(),
                    [](const TrialRecord& t) { return !t.extremes_consistent; });
  out.push_back({"STRUCTURE", structure_bad == 0, true, static_cast<double>(structure_bad), 0.0,
                 0.0, "trials violating side-optimal extremality or proposals = Q(M1)"});
  return out;
}

std::uint64_t shape_seed(std::uint64_t seed, theory::MarketShape shape) noexcept {
  const std::uint64_t key = (std::uint64_t{shape.n1} << 28) ^ shape.n2;
  return rng::derive_seed(seed, rng::stream::kShape + key);
}

SweepResult sweep(const std::vector<theory::MarketShape>& grid, std::uint64_t trials,
                  std::uint64_t seed, const std::filesystem::path& output,
                  const ExperimentConfig& base) {
  SweepResult result;
  std::set<std::pair<Index, Index>> done;
  if (std::ifstream in(output); in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = io::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("config")) continue;  // partial trailing line
      done.emplace(j["config"].value("n1", Index{0}), j["config"].value("n2", Index{0}));
    }
  }
  std::ofstream out(output, std::ios::app);
  if (!out) throw std::runtime_error("cannot open sweep output " + output.string());
  for (const auto& shape : grid) {
    if (!done.emplace(shape.n1, shape.n2).second) {
      result.skipped.push_back(shape);
      continue;
    }
    ExperimentConfig cfg = base;
    cfg.n1 = shape.n1;
    cfg.n2 = shape.n2;
    cfg.trials = trials;
    cfg.seed = shape_seed(seed, shape);
    ExperimentReport report = run_experiment(cfg);
    out << io::to_json(report).dump() << '\n';
    out.flush();
    result.ran.push_back(std::move(report));
  }
  return result;
}

std::string csv_header() {
  return "n1,n2,trials,mean_S,pred_S,mean_qmin,mean_qmax,q_center,mean_rmin,mean_rmax,"
         "r_center,m_frac,w_frac,coupon_mean,mean_proposals";
}

std::string csv_row(const ExperimentReport& r) {
  std::ostringstream os;
  os << std::setprecision(10);
  auto mean = [&](std::string_view field) {
    const auto* f = r.aggregate(field);
    if (f && f->count > 0) os << f->mean;
  };
  auto pred = [&](double theory::Prediction::*member) {
    if (r.prediction) os << (*r.prediction).*member;
  };
  os << r.config.n1 << ',' << r.config.n2 << ',' << r.trials.size() << ',';
  mean("S");
  os << ',';
  pred(&theory::Prediction::es);
  os << ',';
  mean("q_min");
  os << ',';
  mean("q_max");
  os << ',';
  pred(&theory::Prediction::q_center);
  os << ',';
  mean("r_min");
  os << ',';
  mean("r_max");
  os << ',';
  pred(&theory::Prediction::r_center);
  os << ',';
  mean("m_frac");
  os << ',';
  mean("w_frac");
  os << ',';
  pred(&theory::Prediction::coupon_mean);
  os << ',';
  mean("proposals_men");
  return os.str();
}

}  // namespace stablelab::expsuite

#include "stablelab/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "stablelab/engine.hpp"
#include "stablelab/expsuite.hpp"
#include "stablelab/io.hpp"
#include "stablelab/lattice.hpp"
#include "stablelab/quadrature.hpp"
#include "stablelab/rng.hpp"
#include "stablelab/theory.hpp"

namespace stablelab::cli {

namespace {

using io::json;

// Usage problems detected after parsing (bad shapes, bad files).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  Index n1 = 0;
  Index n2 = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
  std::string instance;
  std::string side = "men";
  std::size_t cap = 1'000'000;
  std::uint64_t max_injections = 10'000'000;

  std::string formula = "P";
  std::uint64_t samples = 100'000;
  Index r = 2;
  std::size_t batches = 32;

  std::uint64_t trials = 100;
  std::string mode;
  double q_tol = 0.15;
  double r_tol = 0.15;
  double a = 0.4;
  double b = 0.4;
  double tau = 3.0;
  std::string trial_log;
  std::string csv;
  bool check = false;
  bool no_trials = false;

  std::string grid;

  Index min_n1 = 2;
  Index max_n1 = 5;
  Index extra_women = 3;
  std::uint64_t instances = 500;
};

void emit(const json& j, const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw UsageError("cannot write " + o.out);
  f << j.dump(2) << '\n';
}

Instance load_or_generate(const Options& o, json& config) {
  if (!o.instance.empty()) {
    std::ifstream in(o.instance);
    if (!in) throw UsageError("cannot read instance file " + o.instance);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw UsageError(std::string("instance file is not JSON: ") + e.what());
    }
    config["instance"] = o.instance;
    return io::instance_from_json(j);
  }
  if (o.n1 == 0) throw UsageError("give --instance or --n1/--n2");
  config["n1"] = o.n1;
  config["n2"] = o.n2;
  config["seed"] = o.seed;
  return gen_instance(o.n1, o.n2, o.seed);
}

theory::ToleranceConfig tolerance_config(const Options& o) { return {o.a, o.b, o.tau}; }

int run_generate(const Options& o, std::ostream& out) {
  check_shape(o.n1, o.n2);
  json j = io::to_json(gen_instance(o.n1, o.n2, o.seed));
  j["config"] = {{"subcommand", "generate"}, {"n1", o.n1}, {"n2", o.n2}, {"seed", o.seed}};
  emit(j, o, out);
  return kExitOk;
}

int run_match(const Options& o, std::ostream& out) {
  json config = {{"subcommand", "match"}, {"side", o.side}};
  if (o.side != "men" && o.side != "women") throw UsageError("--side must be men or women");
  const Instance inst = load_or_generate(o, config);
  const auto res = propose(inst, o.side == "men" ? Side::Men : Side::Women);
  json j = {{"config", config},
            {"matching", io::to_json(res.matching)},
            {"ranks", io::to_json(res.ranks)},
            {"stable", is_stable(inst, res.matching)}};
  emit(j, o, out);
  return kExitOk;
}

int run_enumerate(const Options& o, std::ostream& out) {
  json config = {{"subcommand", "enumerate"}, {"cap", o.cap}};
  const Instance inst = load_or_generate(o, config);
  json j = io::to_json(enumerate_all(inst, EnumerateOptions{o.cap}), inst);
  j["config"] = config;
  emit(j, o, out);
  return kExitOk;
}

int run_predict(const Options& o, std::ostream& out) {
  const theory::MarketShape shape{o.n1, o.n2};
  json j = io::to_json(theory::predict(shape, tolerance_config(o)));
  j["limits"] = {{"near_balanced", o.n1 >= 2 ? json(theory::es_limit_near_balanced(shape))
                                             : json(nullptr)},
                 {"wide", theory::es_limit_wide()},
                 {"fixed_ratio", theory::es_limit_ratio(double(o.n2) / o.n1)}};
  j["config"] = {{"subcommand", "predict"}, {"n1", o.n1}, {"n2", o.n2},
                 {"a", o.a},                {"b", o.b},   {"tau", o.tau}};
  emit(j, o, out);
  return kExitOk;
}

int run_integrate(const Options& o, std::ostream& out) {
  check_shape(o.n1, o.n2);
  const quadrature::McConfig mc{o.batches, o.threads};
  json config = {{"subcommand", "integrate"}, {"formula", o.formula}, {"n1", o.n1},
                 {"n2", o.n2},                {"samples", o.samples}, {"seed", o.seed},
                 {"batches", o.batches}};
  json j;
  if (o.formula == "P") {
    j = io::to_json(quadrature::p_stable_mc(o.n1, o.n2, o.samples, o.seed, mc), "P");
  } else if (o.formula == "PKL") {
    const auto table = quadrature::p_kl_mc(o.n1, o.n2, o.samples, o.seed, mc);
    j = io::to_json(table.total(), "PKL");
    json entries = json::array();
    for (std::uint64_t k = o.n1; k < o.n1 + table.dim(); ++k) {
      for (std::uint64_t l = o.n1; l < o.n1 + table.dim(); ++l) {
        const auto e = table.at(k, l);
        if (e.value > 0.0) {
          entries.push_back({{"k", k}, {"l", l}, {"value", e.value}, {"std_error", e.std_error}});
        }
      }
    }
    j["entries"] = std::move(entries);
  } else if (o.formula == "PROT") {
    config["r"] = o.r;
    j = io::to_json(quadrature::p_rotation_mc(o.n1, o.n2, o.r, o.samples, o.seed, mc), "PROT");
  } else if (o.formula == "EMP") {
    j = io::to_json(quadrature::empirical_p_stable(o.n1, o.n2, o.samples, o.seed, o.threads),
                    "EMP");
  } else if (o.formula == "EMPROT") {
    config["r"] = o.r;
    j = io::to_json(
        quadrature::empirical_p_rotation(o.n1, o.n2, o.r, o.samples, o.seed, o.threads),
        "EMPROT");
  } else {
    throw UsageError("unknown --formula " + o.formula);
  }
  j["config"] = config;
  emit(j, o, out);
  return kExitOk;
}

expsuite::ExperimentConfig experiment_config(const Options& o) {
  expsuite::ExperimentConfig c;
  c.n1 = o.n1;
  c.n2 = o.n2;
  c.trials = o.trials;
  c.seed = o.seed;
  if (!o.mode.empty()) c.mode = io::mode_from_string(o.mode);
  c.threads = o.threads;
  c.cap = o.cap;
  c.tolerance = tolerance_config(o);
  c.q_tolerance = o.q_tol;
  c.r_tolerance = o.r_tol;
  return c;
}

int run_simulate(const Options& o, std::ostream& out) {
  check_shape(o.n1, o.n2);
  const auto report = expsuite::run_experiment(experiment_config(o));
  if (!o.trial_log.empty()) {
    std::ofstream log(o.trial_log);
    if (!log) throw UsageError("cannot write " + o.trial_log);
    for (const auto& t : report.trials) log << io::to_json(t).dump() << '\n';
  }
  if (!o.csv.empty()) {
    std::ofstream csv(o.csv);
    if (!csv) throw UsageError("cannot write " + o.csv);
    csv << expsuite::csv_header() << '\n' << expsuite::csv_row(report) << '\n';
  }
  json j = io::to_json(report, !o.no_trials);
  j["config"]["subcommand"] = "simulate";
  j["config"]["threads"] = o.threads;
  emit(j, o, out);
  return o.check && !report.passed() ? kExitCheckFailed : kExitOk;
}

std::vector<theory::MarketShape> parse_grid(const std::string& text) {
  std::vector<theory::MarketShape> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto x = item.find('x');
    if (x == std::string::npos) throw UsageError("grid entries look like 100x110: " + item);
    try {
      std::size_t used1 = 0;
      std::size_t used2 = 0;
      const auto n1 = std::stoul(item.substr(0, x), &used1);
      const auto n2 = std::stoul(item.substr(x + 1), &used2);
      if (used1 != x || used2 != item.size() - x - 1) throw std::invalid_argument(item);
      check_shape(static_cast<Index>(n1), static_cast<Index>(n2));
      grid.push_back({static_cast<Index>(n1), static_cast<Index>(n2)});
    } catch (const std::invalid_argument&) {
      throw UsageError("bad grid entry: " + item);
    } catch (const std::out_of_range&) {
      throw UsageError("bad grid entry: " + item);
    }
  }
  return grid;
}

int run_sweep(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw UsageError("sweep needs --out for the JSON-lines file");
  const auto grid = parse_grid(o.grid);
  auto base = experiment_config(o);
  const auto result = expsuite::sweep(grid, o.trials, o.seed, o.out, base);
  if (!o.csv.empty()) {
    const bool fresh = !std::filesystem::exists(o.csv);
    std::ofstream csv(o.csv, std::ios::app);
    if (!csv) throw UsageError("cannot write " + o.csv);
    if (fresh) csv << expsuite::csv_header() << '\n';
    for (const auto& r : result.ran) csv << expsuite::csv_row(r) << '\n';
  }
  json ran = json::array();
  for (const auto& r : result.ran) ran.push_back({r.config.n1, r.config.n2});
  json skipped = json::array();
  for (const auto& s : result.skipped) skipped.push_back({s.n1, s.n2});
  json j = {{"config",
             {{"subcommand", "sweep"}, {"grid", o.grid}, {"trials", o.trials}, {"seed", o.seed},
              {"out", o.out}}},
            {"ran", ran},
            {"skipped", skipped}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

int run_oracle_check(const Options& o, std::ostream& out) {
  if (o.min_n1 < 1 || o.max_n1 < o.min_n1) throw UsageError("need 1 <= --min-n1 <= --max-n1");
  std::vector<std::pair<Index, Index>> shapes;
  for (Index n1 = o.min_n1; n1 <= o.max_n1; ++n1) {
    for (Index n2 = n1; n2 <= n1 + o.extra_women; ++n2) shapes.emplace_back(n1, n2);
  }
  std::uint64_t mismatches = 0;
  json failures = json::array();
  for (std::uint64_t i = 0; i < o.instances; ++i) {
    const auto [n1, n2] = shapes[i % shapes.size()];
    const std::uint64_t seed = rng::derive_seed(o.seed, rng::stream::kTrial + i);
    const Instance inst = gen_instance(n1, n2, seed);
    const auto fast = enumerate_all(inst, EnumerateOptions{o.cap});
    const auto slow = brute_force_all(inst, BruteForceOptions{o.max_injections});
    if (fast.matchings != slow.matchings) {
      ++mismatches;
      if (failures.size() < 10) failures.push_back({{"n1", n1}, {"n2", n2}, {"seed", seed}});
    }
  }
  json j = {{"config",
             {{"subcommand", "oracle-check"}, {"min_n1", o.min_n1}, {"max_n1", o.max_n1},
              {"extra_women", o.extra_women}, {"instances", o.instances}, {"seed", o.seed}}},
            {"instances", o.instances},
            {"mismatches", mismatches},
            {"failures", failures},
            {"passed", mismatches == 0}};
  emit(j, o, out);
  return mismatches == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Stable matchings in unbalanced random markets"};
  app.name("stablelab");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "RNG seed (falls back to $STABLELAB_SEED, then 0)")
        ->envname("STABLELAB_SEED");
  };
  auto add_shape = [&](CLI::App* sub, bool required) {
    auto* n1 = sub->add_option("--n1", o.n1, "number of men")->check(CLI::PositiveNumber);
    auto* n2 = sub->add_option("--n2", o.n2, "number of women (>= n1)")->check(CLI::PositiveNumber);
    if (required) {
      n1->required();
      n2->required();
    }
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "write the JSON result here instead of stdout");
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  };
  auto add_tolerance = [&](CLI::App* sub) {
    sub->add_option("--a", o.a, "exponent of n1 in delta when s <= tau")->check(CLI::Range(0.0, 0.5));
    sub->add_option("--b", o.b, "exponent of s in delta when s > tau")->check(CLI::Range(0.0, 0.5));
    sub->add_option("--tau", o.tau, "regime switch threshold for s")->check(CLI::PositiveNumber);
  };

  auto* generate = app.add_subcommand("generate", "random preference instance as JSON");
  add_shape(generate, true);
  add_seed(generate);
  add_out(generate);

  auto* match = app.add_subcommand("match", "men- or women-optimal stable matching");
  add_shape(match, false);
  add_seed(match);
  add_out(match);
  match->add_option("--instance", o.instance, "instance JSON file (instead of --n1/--n2/--seed)");
  match->add_option("--side", o.side, "proposing side")->check(CLI::IsMember({"men", "women"}));

  auto* enumerate = app.add_subcommand("enumerate", "all stable matchings via rotations");
  add_shape(enumerate, false);
  add_seed(enumerate);
  add_out(enumerate);
  enumerate->add_option("--instance", o.instance, "instance JSON file");
  enumerate->add_option("--cap", o.cap, "abort when the stable set exceeds this size");

  auto* predict = app.add_subcommand("predict", "asymptotic predictions for a market shape");
  add_shape(predict, true);
  add_tolerance(predict);
  add_out(predict);

  auto* integrate = app.add_subcommand("integrate", "Monte Carlo stability probabilities");
  add_shape(integrate, true);
  add_seed(integrate);
  add_out(integrate);
  add_threads(integrate);
  integrate
      ->add_option("--formula", o.formula,
                   "P (stable), PKL (joint rank table), PROT (rotation), EMP or EMPROT "
                   "(empirical frequencies over random instances)")
      ->check(CLI::IsMember({"P", "PKL", "PROT", "EMP", "EMPROT"}));
  integrate->add_option("--samples", o.samples, "samples (or instances for EMP/EMPROT)")
      ->check(CLI::PositiveNumber);
  integrate->add_option("--r", o.r, "rotation length for PROT/EMPROT");
  integrate->add_option("--batches", o.batches, "batches for the batch-means error")
      ->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiment with verdicts");
  add_shape(simulate, true);
  add_seed(simulate);
  add_out(simulate);
  add_threads(simulate);
  add_tolerance(simulate);
  simulate->add_option("--trials", o.trials, "random instances")->check(CLI::PositiveNumber);
  simulate
      ->add_option("--mode", o.mode,
                   "ENUMERATE or EXTREMES_ONLY (empty: ENUMERATE below n1 = 2000)")
      ->check(CLI::IsMember({"", "ENUMERATE", "EXTREMES_ONLY"}));
  simulate->add_option("--cap", o.cap, "stable-set cap per trial; larger sets are censored");
  simulate->add_option("--q-tol", o.q_tol, "relative band for Q around n2 s");
  simulate->add_option("--r-tol", o.r_tol, "relative band for R around n1^2 f(s), times max(1, delta*)");
  simulate->add_option("--trial-log", o.trial_log, "write one JSON trial record per line");
  simulate->add_option("--csv", o.csv, "write the one-row CSV summary");
  simulate->add_flag("--check", o.check, "exit 1 if a gating verdict fails");
  simulate->add_flag("--no-trials", o.no_trials, "omit per-trial records from the report");

  auto* sweep = app.add_subcommand("sweep", "experiments over a grid of shapes (resumable)");
  add_seed(sweep);
  add_threads(sweep);
  add_tolerance(sweep);
  sweep->add_option("--grid", o.grid, "comma separated shapes, e.g. 100x101,100x110")->required();
  sweep->add_option("--trials", o.trials, "random instances per shape")->check(CLI::PositiveNumber);
  sweep->add_option("--mode", o.mode, "ENUMERATE or EXTREMES_ONLY (empty: by n1)")
      ->check(CLI::IsMember({"", "ENUMERATE", "EXTREMES_ONLY"}));
  sweep->add_option("--cap", o.cap, "stable-set cap per trial");
  sweep->add_option("--q-tol", o.q_tol, "relative band for Q");
  sweep->add_option("--r-tol", o.r_tol, "relative band for R");
  sweep->add_option("--out", o.out, "JSON-lines report file (appended to)")->required();
  sweep->add_option("--csv", o.csv, "CSV summary file (appended to)");

  auto* oracle = app.add_subcommand("oracle-check", "rotation enumeration vs brute force");
  add_seed(oracle);
  add_out(oracle);
  oracle->add_option("--min-n1", o.min_n1, "smallest n1");
  oracle->add_option("--max-n1", o.max_n1, "largest n1");
  oracle->add_option("--extra-women", o.extra_women, "n2 ranges over n1 .. n1 + this");
  oracle->add_option("--instances", o.instances, "instances, cycled over the shapes");
  oracle->add_option("--cap", o.cap, "stable-set cap");
  oracle->add_option("--max-injections", o.max_injections, "brute-force bound");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    if (name == "generate") return run_generate(o, out);
    if (name == "match") return run_match(o, out);
    if (name == "enumerate") return run_enumerate(o, out);
    if (name == "predict") return run_predict(o, out);
    if (name == "integrate") return run_integrate(o, out);
    if (name == "simulate") return run_simulate(o, out);
    if (name == "sweep") return run_sweep(o, out);
    if (name == "oracle-check") return run_oracle_check(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << chosen->help();
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n\n" << chosen->help();
    return kExitUsage;
  } catch (const quadrature::GuardExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const OracleBoundExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace stablelab::cli

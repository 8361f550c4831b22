#include "stablelab/io.hpp"

#include <stdexcept>
#include <string>

namespace stablelab::io {

json to_json(const Instance& inst) {
  json men = json::array();
  for (Index m = 0; m < inst.n1(); ++m) {
    const auto row = inst.man_list(m);
    men.push_back(std::vector<Index>(row.begin(), row.end()));
  }
  json women = json::array();
  for (Index w = 0; w < inst.n2(); ++w) {
    const auto row = inst.woman_list(w);
    women.push_back(std::vector<Index>(row.begin(), row.end()));
  }
  return {{"n1", inst.n1()}, {"n2", inst.n2()}, {"men_pref", men}, {"women_pref", women}};
}

Instance instance_from_json(const json& j) {
  try {
    const auto n1 = j.at("n1").get<Index>();
    const auto n2 = j.at("n2").get<Index>();
    auto men = j.at("men_pref").get<std::vector<std::vector<Index>>>();
    auto women = j.at("women_pref").get<std::vector<std::vector<Index>>>();
    if (men.size() != n1 || women.size() != n2) {
      throw std::domain_error("instance lists do not match n1/n2");
    }
    return Instance::from_lists(men, women);
  } catch (const json::exception& e) {
    throw std::domain_error(std::string("malformed instance JSON: ") + e.what());
  }
}

json to_json(const Matching& m) {
  return {{"wife_of", m.wife_of}, {"unmatched_women", m.unmatched_women()}};
}

Matching matching_from_json(const json& j, Index n2) {
  try {
    return Matching::from_wives(j.at("wife_of").get<std::vector<Index>>(), n2);
  } catch (const json::exception& e) {
    throw std::domain_error(std::string("malformed matching JSON: ") + e.what());
  }
}

json to_json(const RankPair& rp) {
  json j = {{"Q", rp.q}, {"R", rp.r}};
  j["proposals"] = rp.proposals ? json(*rp.proposals) : json(nullptr);
  return j;
}

json to_json(const Rotation& rho) {
  json pairs = json::array();
  for (const auto& [m, w] : rho.pairs()) pairs.push_back({m, w});
  return pairs;
}

json to_json(const StableSet& ss, const Instance& inst) {
  json members = json::array();
  for (const auto& m : ss.matchings) {
    json jm = to_json(m);
    const auto rp = ranks(inst, m);
    jm["Q"] = rp.q;
    jm["R"] = rp.r;
    members.push_back(std::move(jm));
  }
  json rotations = json::array();
  for (const auto& rho : ss.rotations) rotations.push_back(to_json(rho));
  const auto mult = multiplicity(ss);
  json summary = {{"size", ss.size()},
                  {"men_optimal", ss.men_optimal},
                  {"women_optimal", ss.women_optimal},
                  {"m_frac", mult.m_frac},
                  {"w_frac", mult.w_frac},
                  {"total_rotation_length", mult.total_rotation_length},
                  {"per_man_partner_count", ss.per_man_partner_count},
                  {"per_woman_partner_count", ss.per_woman_partner_count},
                  {"rotations", rotations}};
  return {{"matchings", members}, {"summary", summary}};
}

json to_json(const theory::Prediction& p) {
  return {{"n1", p.shape.n1},         {"n2", p.shape.n2},
          {"s", p.s},                 {"ES", p.es},
          {"q_center", p.q_center},   {"r_center", p.r_center},
          {"delta", p.delta},         {"delta_star", p.delta_star},
          {"h", p.h},                 {"coupon_mean", p.coupon_mean}};
}

json to_json(const quadrature::Estimate& e, std::string_view formula_id) {
  return {{"value", e.value},
          {"std_error", e.std_error},
          {"samples", e.samples},
          {"formula_id", std::string(formula_id)}};
}

std::string_view to_string(expsuite::Mode mode) {
  return mode == expsuite::Mode::Enumerate ? "ENUMERATE" : "EXTREMES_ONLY";
}

expsuite::Mode mode_from_string(std::string_view s) {
  if (s == "ENUMERATE" || s == "enumerate") return expsuite::Mode::Enumerate;
  if (s == "EXTREMES_ONLY" || s == "extremes") return expsuite::Mode::ExtremesOnly;
  throw std::domain_error("unknown mode: " + std::string(s));
}

json to_json(const expsuite::ExperimentConfig& c) {
  return {{"n1", c.n1},
          {"n2", c.n2},
          {"trials", c.trials},
          {"seed", c.seed},
          {"mode", std::string(to_string(c.effective_mode()))},
          {"cap", c.cap},
          {"a", c.tolerance.a},
          {"b", c.tolerance.b},
          {"tau", c.tolerance.tau},
          {"q_tolerance", c.q_tolerance},
          {"r_tolerance", c.r_tolerance},
          {"conc_fail_fraction", c.conc_fail_fraction},
          {"es_band", c.es_band},
          {"mult_threshold", c.mult_threshold},
          {"coupon_slack", c.coupon_slack}};
}

json to_json(const expsuite::TrialRecord& t) {
  auto opt = [](const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); };
  return {{"seed", t.seed},
          {"n1", t.n1},
          {"n2", t.n2},
          {"S", opt(t.s)},
          {"q_min", t.q_min},
          {"q_max", t.q_max},
          {"r_min", t.r_min},
          {"r_max", t.r_max},
          {"proposals_men", t.proposals_men},
          {"m_frac", t.m_frac},
          {"w_frac", t.w_frac},
          {"total_rotation_length", opt(t.total_rotation_length)},
          {"censored", t.censored},
          {"women_set_invariant", t.women_set_invariant},
          {"extremes_consistent", t.extremes_consistent},
          {"wall_time", t.wall_time}};
}

json to_json(const expsuite::FieldSummary& f) {
  return {{"count", f.count}, {"mean", f.mean}, {"std", f.std}, {"min", f.min},
          {"max", f.max},     {"p05", f.p05},   {"p25", f.p25}, {"p50", f.p50},
          {"p75", f.p75},     {"p95", f.p95}};
}

json to_json(const expsuite::Verdict& v) {
  return {{"name", v.name},          {"passed", v.passed},
          {"gating", v.gating},      {"observed", v.observed},
          {"predicted", v.predicted}, {"tolerance", v.tolerance},
          {"detail", v.detail}};
}

json to_json(const expsuite::ExperimentReport& r, bool with_trials) {
  json aggregates = json::object();
  for (const auto& [name, f] : r.aggregates) aggregates[name] = to_json(f);
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
  json j = {{"config", to_json(r.config)},
            {"mode", std::string(to_string(r.mode))},
            {"completed", r.completed},
            {"censored", r.censored},
            {"aggregates", aggregates},
            {"prediction", r.prediction ? to_json(*r.prediction) : json(nullptr)},
            {"verdicts", verdicts},
            {"passed", r.passed()}};
  if (with_trials) {
    json trials = json::array();
    for (const auto& t : r.trials) trials.push_back(to_json(t));
    j["trials"] = std::move(trials);
  }
  return j;
}

}  // namespace stablelab::io

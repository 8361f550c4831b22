#pragma once

#include <string_view>

#include <json.hpp>

#include "stablelab/engine.hpp"
#include "stablelab/expsuite.hpp"
#include "stablelab/lattice.hpp"
#include "stablelab/prefgen.hpp"
#include "stablelab/quadrature.hpp"
#include "stablelab/theory.hpp"

namespace stablelab::io {

using nlohmann::json;

/// {n1, n2, men_pref, women_pref}, 0-based indices, nested lists.
json to_json(const Instance& inst);
/// Throws std::domain_error on malformed input.
Instance instance_from_json(const json& j);

/// {wife_of, unmatched_women}.
json to_json(const Matching& m);
Matching matching_from_json(const json& j, Index n2);

json to_json(const RankPair& rp);
json to_json(const Rotation& rho);

/// {matchings: [{wife_of, unmatched_women, Q, R}], summary: {...}}.
json to_json(const StableSet& ss, const Instance& inst);

json to_json(const theory::Prediction& p);
json to_json(const quadrature::Estimate& e, std::string_view formula_id);

std::string_view to_string(expsuite::Mode mode);
expsuite::Mode mode_from_string(std::string_view s);

json to_json(const expsuite::ExperimentConfig& c);
json to_json(const expsuite::TrialRecord& t);
json to_json(const expsuite::FieldSummary& f);
json to_json(const expsuite::Verdict& v);
/// Full report; per-trial records are included unless `with_trials` is false.
json to_json(const expsuite::ExperimentReport& r, bool with_trials = true);

}  // namespace stablelab::io

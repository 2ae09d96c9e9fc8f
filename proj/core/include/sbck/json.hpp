#pragma once

#include <nlohmann/json.hpp>

#include "sbck/compliance.hpp"
#include "sbck/lts.hpp"

namespace sbck {

// Behaviours appear as render() strings and an empty past as "o".

nlohmann::json to_json(const Past& p);
nlohmann::json to_json(const Config& c);
nlohmann::json to_json(const Judgment& j);
nlohmann::json to_json(const Trace& t);
nlohmann::json to_json(const ViolationPath& path);
nlohmann::json to_json(const DerivationNode& root);
nlohmann::json to_json(const RuleCounts& counts);

/// {compliant, rule_counts, evidence, states_explored}. `evidence` is
/// {"kind": "derivation", "tree": ...}, {"kind": "path", "steps": [...]}
/// or {"kind": "none"}.
nlohmann::json to_json(const Verdict& v);

}  // namespace sbck

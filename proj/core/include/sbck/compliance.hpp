#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "sbck/lts.hpp"

namespace sbck {

/// `clientPast < client  -|  serverPast < server`. Same shape as a system
/// state; kept as an alias so proofs and reductions share one vocabulary.
using Judgment = SystemState;

enum class Rule { Ax, Hyp, ExtInt, IntExt };

std::string_view to_string(Rule r);

struct DerivationNode;
using Derivation = std::shared_ptr<const DerivationNode>;

/// One rule instance of the compliance proof system. Subproofs may be
/// shared between parents, so a derivation is a DAG.
struct DerivationNode {
  Rule rule = Rule::Ax;
  Judgment conclusion;
  std::vector<Derivation> premises;
};

/// A reduction sequence from the initial state to a state that breaks
/// compliance.
struct ViolationPath {
  SystemState start;
  std::vector<PairStep> steps;

  const SystemState& end() const { return steps.empty() ? start : steps.back().target; }
};

struct RuleCounts {
  std::size_t ax = 0;
  std::size_t hyp = 0;
  std::size_t ext_int = 0;
  std::size_t int_ext = 0;
};

struct Verdict {
  bool compliant = false;
  /// Derivation for compliant axiomatic verdicts, a path for every
  /// non-compliant verdict, nothing for compliant oracle verdicts.
  std::variant<std::monostate, Derivation, ViolationPath> evidence;
  RuleCounts rule_counts;
  std::size_t states_explored = 0;

  const Derivation* derivation() const { return std::get_if<Derivation>(&evidence); }
  const ViolationPath* violation() const { return std::get_if<ViolationPath>(&evidence); }
};

struct CheckOptions {
  /// Budget on explored judgments or states; exceeding it throws
  /// StateCapExceeded.
  std::size_t max_states = 100'000;
};

/// Condition (1) of checkpoint compliance: a state without synchronisation
/// must have a successful client and aligned pasts.
bool satisfies_stuck_condition(const SystemState& s);

/// Goal-directed proof search in the rule system {Ax, Hyp, ExtInt, IntExt}.
Verdict check_axiomatic(const WellFormedBehaviour& client, const WellFormedBehaviour& server,
                        const CheckOptions& options = {});

/// Reachable pair states with their successors, in discovery order.
struct StateGraph {
  std::vector<SystemState> states;
  std::vector<std::vector<PairStep>> successors;
  std::vector<std::vector<std::size_t>> successor_ids;

  std::size_t index_of(const SystemState& s) const;
};

StateGraph explore(const SystemState& start, std::size_t max_states);

/// Greatest fixpoint by iterated removal. rank[i] is the round in which
/// state i was removed (1 = fails the stuck condition), or 0 if it
/// survives. `rounds` counts removal rounds until stabilisation.
struct Fixpoint {
  std::vector<std::size_t> rank;
  std::size_t rounds = 0;
};

Fixpoint greatest_fixpoint(const StateGraph& graph);

Verdict check_gfp_oracle(const WellFormedBehaviour& client, const WellFormedBehaviour& server,
                         const CheckOptions& options = {});

/// Compliance without checkpoints, where an internal choice first commits
/// to a branch on its own and the committed output then synchronises.
/// Throws std::invalid_argument if either side has a checkpoint.
bool check_standard(const WellFormedBehaviour& client, const WellFormedBehaviour& server,
                    const CheckOptions& options = {});

/// An endpoint of the standard semantics: a head-normal behaviour plus the
/// branch an internal choice has committed to (empty if none).
struct StandardEnd {
  WellFormedBehaviour behaviour;
  std::string committed;
  friend bool operator==(const StandardEnd&, const StandardEnd&) = default;
};

struct StandardState {
  StandardEnd client;
  StandardEnd server;
  std::size_t hash() const;
  friend bool operator==(const StandardState&, const StandardState&) = default;
};

std::vector<StandardState> standard_steps(const StandardState& s);
StandardState standard_initial(const WellFormedBehaviour& client, const WellFormedBehaviour& server);

struct VerifyResult {
  bool ok = true;
  /// Position of the first bad node as premise indices from the root,
  /// e.g. "root.0.1".
  std::string node;
  std::string reason;
};

/// Re-checks every node of a derivation against its rule schema, starting
/// from an empty hypothesis environment.
VerifyResult verify_derivation(const DerivationNode& root);

/// True if every step of `path` is offered by pair_steps and the final
/// state fails the stuck condition or cannot be in the fixpoint.
bool replay_violation(const ViolationPath& path);

/// `d < r -| g < s`.
std::string render_judgment(const Judgment& j);
/// Indented text form, one node per line.
std::string render(const DerivationNode& root);

}  // namespace sbck

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "compliance_detail.hpp"
#include "sbck/compliance.hpp"

namespace sbck {

namespace {

// Proof search for `Gamma |> d < r -| g < s`. Gamma is the set of
// judgments on the current search path. Only one rule schema fits any goal,
// so a failed premise fails every goal above it and the search stops at the
// first refusal.
//
// Finished proofs are cached together with the hypotheses they borrowed
// from outside their own subtree. A cached proof whose hypotheses have
// since left the path is closed by grafting the finished proofs of those
// hypotheses onto its Hyp leaves, so every judgment is expanded once.
class ProofSearch {
public:
  explicit ProofSearch(std::size_t cap) : cap_(cap) {}

  struct Proof {
    Derivation node;
    std::vector<std::uint32_t> assumptions;  // sorted judgment ids
  };

  std::optional<Proof> prove(const Judgment& goal) { return prove_id(intern(goal)); }

  std::size_t explored() const { return explored_; }
  const std::optional<Judgment>& refused() const { return refused_; }

private:
  std::uint32_t intern(const Judgment& j) {
    auto [it, inserted] = ids_.try_emplace(j, static_cast<std::uint32_t>(judgments_.size()));
    if (inserted) {
      judgments_.push_back(j);
      on_path_.push_back(0);
    }
    return it->second;
  }

  std::optional<Proof> refuse(std::uint32_t id) {
    refused_ = judgments_[id];
    return std::nullopt;
  }

  static Derivation make(Rule rule, const Judgment& j, std::vector<Derivation> premises) {
    auto n = std::make_shared<DerivationNode>();
    n->rule = rule;
    n->conclusion = j;
    n->premises = std::move(premises);
    return n;
  }

  bool in_scope(const std::vector<std::uint32_t>& assumptions) const {
    return std::all_of(assumptions.begin(), assumptions.end(), [&](std::uint32_t a) { return on_path_[a] != 0; });
  }

  static void merge(std::vector<std::uint32_t>& into, const std::vector<std::uint32_t>& from) {
    std::vector<std::uint32_t> out;
    out.reserve(into.size() + from.size());
    std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
    into = std::move(out);
  }

  std::optional<Proof> prove_id(std::uint32_t id) {
    if (on_path_[id] != 0) {
      return Proof{make(Rule::Hyp, judgments_[id], {}), {id}};
    }
    if (auto p = reuse(id)) return p;
    if (++explored_ > cap_) throw StateCapExceeded(cap_);

    const Judgment goal = judgments_[id];
    const Past& client_past = goal.client.past();
    const Past& server_past = goal.server.past();
    const WellFormedBehaviour& client = goal.client.current();
    const WellFormedBehaviour& server = goal.server.current();
    const bool no_pasts = client_past.empty() && server_past.empty();
    const bool both_pasts = client_past.has_value() && server_past.has_value();

    if (client->is_success()) {
      // Ax does not extend Gamma; its premise is a rollback onto two choices.
      if (no_pasts) {
        return store(id, Proof{make(Rule::Ax, goal, {}), {}});
      }
      if (!both_pasts) return refuse(id);
      auto sub = prove_id(intern(detail::rolled_back(goal)));
      if (!sub) return std::nullopt;
      return store(id, Proof{make(Rule::Ax, goal, {sub->node}), sub->assumptions});
    }

    Rule rule;
    std::set<std::string> shared;
    if (client->kind() == Kind::External && server->kind() == Kind::Internal) {
      rule = Rule::ExtInt;
      shared = oplus_acts(server);
      auto offered = sum_acts(client);
      if (!std::includes(offered.begin(), offered.end(), shared.begin(), shared.end())) return refuse(id);
    } else if (client->kind() == Kind::Internal && server->kind() == Kind::External) {
      rule = Rule::IntExt;
      shared = oplus_acts(client);
      auto offered = sum_acts(server);
      if (!std::includes(offered.begin(), offered.end(), shared.begin(), shared.end())) return refuse(id);
    } else {
      return refuse(id);
    }

    on_path_[id] = 1;
    Past client_next = checkpoint_update(client_past, client);
    Past server_next = checkpoint_update(server_past, server);
    std::vector<Derivation> premises;
    std::vector<std::uint32_t> assumptions;
    auto premise = [&](const Judgment& j) {
      auto sub = prove_id(intern(j));
      if (!sub) return false;
      premises.push_back(sub->node);
      merge(assumptions, sub->assumptions);
      return true;
    };
    bool ok = true;
    for (const auto& label : shared) {
      Judgment next{Config(client_next, branch_target(client, label)),
                    Config(server_next, branch_target(server, label))};
      if (!premise(next)) {
        ok = false;
        break;
      }
    }
    // With exactly one past set no rollback is possible, so no premise.
    if (ok && both_pasts) ok = premise(detail::rolled_back(goal));
    on_path_[id] = 0;
    if (!ok) return std::nullopt;

    assumptions.erase(std::remove(assumptions.begin(), assumptions.end(), id), assumptions.end());
    return store(id, Proof{make(rule, goal, std::move(premises)), std::move(assumptions)});
  }

  Proof store(std::uint32_t id, Proof p) {
    cache_[id].push_back(p);
    free_.emplace(p.node.get(), p.assumptions);
    return p;
  }

  // A proof of a finished judgment valid on the current path.
  std::optional<Proof> reuse(std::uint32_t id) {
    auto hit = cache_.find(id);
    if (hit == cache_.end()) return std::nullopt;
    for (const auto& p : hit->second) {
      if (in_scope(p.assumptions)) return p;
    }
    const Proof base = hit->second.front();
    std::unordered_map<std::uint32_t, Derivation> grafts;
    std::vector<std::uint32_t> assumptions;
    for (std::uint32_t a : base.assumptions) {
      if (on_path_[a] != 0) {
        merge(assumptions, {a});
        continue;
      }
      // Off the path means finished: a is an ancestor that completed.
      auto sub = reuse(a);
      if (!sub) throw std::logic_error("hypothesis left the path without a proof");
      grafts.emplace(a, sub->node);
      merge(assumptions, sub->assumptions);
    }
    std::unordered_map<const DerivationNode*, Derivation> memo;
    return store(id, Proof{graft(base.node, grafts, memo), std::move(assumptions)});
  }

  Derivation graft(const Derivation& n, const std::unordered_map<std::uint32_t, Derivation>& grafts,
                   std::unordered_map<const DerivationNode*, Derivation>& memo) {
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    Derivation out = n;
    // Subproofs that never mention a grafted hypothesis are shared as is.
    auto f = free_.find(n.get());
    if (f != free_.end() && std::none_of(f->second.begin(), f->second.end(),
                                         [&](std::uint32_t a) { return grafts.count(a) != 0; })) {
    } else if (n->rule == Rule::Hyp) {
      if (auto g = grafts.find(ids_.at(n->conclusion)); g != grafts.end()) out = g->second;
    } else {
      std::vector<Derivation> premises;
      bool changed = false;
      for (const auto& p : n->premises) {
        premises.push_back(graft(p, grafts, memo));
        changed = changed || premises.back() != p;
      }
      if (changed) out = make(n->rule, n->conclusion, std::move(premises));
    }
    memo.emplace(n.get(), out);
    return out;
  }

  std::size_t cap_;
  std::unordered_map<Judgment, std::uint32_t, SystemStateHash> ids_;
  std::vector<Judgment> judgments_;
  std::vector<char> on_path_;
  std::unordered_map<std::uint32_t, std::vector<Proof>> cache_;
  std::unordered_map<const DerivationNode*, std::vector<std::uint32_t>> free_;
  std::size_t explored_ = 0;
  std::optional<Judgment> refused_;
};

// Distinct nodes of the derivation, by rule.
RuleCounts count_rules(const DerivationNode& root) {
  RuleCounts counts;
  std::unordered_set<const DerivationNode*> seen;
  std::vector<const DerivationNode*> stack{&root};
  while (!stack.empty()) {
    const DerivationNode* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    switch (n->rule) {
      case Rule::Ax: ++counts.ax; break;
      case Rule::Hyp: ++counts.hyp; break;
      case Rule::ExtInt: ++counts.ext_int; break;
      case Rule::IntExt: ++counts.int_ext; break;
    }
    for (const auto& p : n->premises) stack.push_back(p.get());
  }
  return counts;
}

}  // namespace

Verdict check_axiomatic(const WellFormedBehaviour& client, const WellFormedBehaviour& server,
                        const CheckOptions& options) {
  SystemState start = initial_state(client, server);
  ProofSearch search(options.max_states);
  auto proof = search.prove(start);

  Verdict v;
  v.states_explored = search.explored();
  if (proof) {
    v.compliant = true;
    v.rule_counts = count_rules(*proof->node);
    v.evidence = proof->node;
    return v;
  }
  v.compliant = false;
  // The proof system has no refutation rules; the refused goal is a
  // reachable state failing the stuck condition, so report the path to it.
  auto path = detail::path_to(start, search.refused().value(), options.max_states);
  if (!path) throw std::logic_error("refused judgment is not reachable from the initial state");
  v.evidence = std::move(*path);
  return v;
}

}  // namespace sbck

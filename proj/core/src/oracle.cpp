#include <algorithm>
#include <deque>
#include <unordered_map>

#include "compliance_detail.hpp"
#include "sbck/compliance.hpp"

namespace sbck {

bool satisfies_stuck_condition(const SystemState& s) {
  if (has_tau_step(s)) return true;
  if (!s.client.current()->is_success()) return false;
  bool no_pasts = s.client.past().empty() && s.server.past().empty();
  bool both_pasts = s.client.past().has_value() && s.server.past().has_value();
  return no_pasts || both_pasts;
}

std::size_t StateGraph::index_of(const SystemState& s) const {
  auto it = std::find(states.begin(), states.end(), s);
  return it == states.end() ? states.size() : static_cast<std::size_t>(it - states.begin());
}

StateGraph explore(const SystemState& start, std::size_t max_states) {
  StateGraph g;
  std::unordered_map<SystemState, std::size_t, SystemStateHash> ids;
  auto add = [&](const SystemState& s) {
    auto [it, inserted] = ids.try_emplace(s, g.states.size());
    if (inserted) {
      if (g.states.size() >= max_states) throw StateCapExceeded(max_states);
      g.states.push_back(s);
    }
    return it->second;
  };
  add(start);
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    auto steps = pair_steps(g.states[i]);
    std::vector<std::size_t> targets;
    targets.reserve(steps.size());
    for (const auto& st : steps) targets.push_back(add(st.target));
    g.successors.push_back(std::move(steps));
    g.successor_ids.push_back(std::move(targets));
  }
  return g;
}

Fixpoint greatest_fixpoint(const StateGraph& graph) {
  const std::size_t n = graph.states.size();
  std::vector<std::vector<std::size_t>> predecessors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t : graph.successor_ids[i]) predecessors[t].push_back(i);
  }
  auto stuck_ok = [&](std::size_t i) {
    const auto& steps = graph.successors[i];
    if (std::any_of(steps.begin(), steps.end(), [](const PairStep& st) { return st.label.is_tau(); })) return true;
    const SystemState& s = graph.states[i];
    if (!s.client.current()->is_success()) return false;
    return s.client.past().has_value() == s.server.past().has_value();
  };

  // R_{k+1} keeps the states of R_k that satisfy the stuck condition and
  // whose successors all lie in R_k. A state can only leave in round k+1
  // if it fails the condition (round 1) or a successor left in round k, so
  // each round only re-examines predecessors of the previous removals.
  Fixpoint fp;
  fp.rank.assign(n, 0);
  std::vector<std::size_t> candidates(n);
  for (std::size_t i = 0; i < n; ++i) candidates[i] = i;
  for (std::size_t round = 1;; ++round) {
    std::vector<std::size_t> removed;
    for (std::size_t i : candidates) {
      if (fp.rank[i] != 0) continue;
      bool keep = stuck_ok(i);
      if (keep) {
        for (std::size_t t : graph.successor_ids[i]) {
          if (fp.rank[t] != 0 && fp.rank[t] < round) {
            keep = false;
            break;
          }
        }
      }
      if (!keep) removed.push_back(i);
    }
    removed.erase(std::unique(removed.begin(), removed.end()), removed.end());
    if (removed.empty()) break;
    std::vector<std::size_t> next;
    for (std::size_t i : removed) {
      if (fp.rank[i] == 0) fp.rank[i] = round;
    }
    for (std::size_t i : removed) {
      for (std::size_t p : predecessors[i]) {
        if (fp.rank[p] == 0) next.push_back(p);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    candidates = std::move(next);
    fp.rounds = round;
  }
  return fp;
}

Verdict check_gfp_oracle(const WellFormedBehaviour& client, const WellFormedBehaviour& server,
                         const CheckOptions& options) {
  StateGraph graph = explore(initial_state(client, server), options.max_states);
  Fixpoint fp = greatest_fixpoint(graph);

  Verdict v;
  v.states_explored = graph.states.size();
  v.compliant = fp.rank[0] == 0;
  if (v.compliant) return v;

  // Each removed state has a successor removed one round earlier; follow
  // those down to a state that fails the stuck condition.
  ViolationPath path;
  path.start = graph.states[0];
  std::size_t cur = 0;
  while (fp.rank[cur] > 1) {
    const auto& ids = graph.successor_ids[cur];
    std::size_t pick = ids.size();
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (fp.rank[ids[k]] != 0 && fp.rank[ids[k]] < fp.rank[cur]) {
        pick = k;
        break;
      }
    }
    if (pick == ids.size()) throw std::logic_error("removed state without an earlier-removed successor");
    path.steps.push_back(graph.successors[cur][pick]);
    cur = ids[pick];
  }
  v.evidence = std::move(path);
  return v;
}

namespace detail {

std::optional<ViolationPath> path_to(const SystemState& start, const SystemState& target, std::size_t max_states) {
  struct Visit {
    std::size_t parent;
    PairStep via;
  };
  std::vector<SystemState> states{start};
  std::vector<Visit> visits{{0, {}}};
  std::unordered_map<SystemState, std::size_t, SystemStateHash> seen{{start, 0}};
  std::optional<std::size_t> found;
  if (start == target) found = 0;
  for (std::size_t i = 0; i < states.size() && !found; ++i) {
    for (auto& st : pair_steps(states[i])) {
      if (seen.count(st.target) != 0) continue;
      if (states.size() >= max_states) throw StateCapExceeded(max_states);
      seen.emplace(st.target, states.size());
      states.push_back(st.target);
      bool hit = st.target == target;
      visits.push_back({i, std::move(st)});
      if (hit) {
        found = states.size() - 1;
        break;
      }
    }
  }
  if (!found) return std::nullopt;
  ViolationPath path;
  path.start = start;
  for (std::size_t at = *found; at != 0; at = visits[at].parent) path.steps.push_back(visits[at].via);
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

}  // namespace detail

bool replay_violation(const ViolationPath& path) {
  SystemState cur = path.start;
  for (const auto& step : path.steps) {
    auto offered = pair_steps(cur);
    bool found = std::any_of(offered.begin(), offered.end(), [&](const PairStep& o) {
      return same_action(o.label, step.label) && o.target == step.target;
    });
    if (!found) return false;
    cur = step.target;
  }
  if (!satisfies_stuck_condition(cur)) return true;
  StateGraph graph = explore(cur, CheckOptions{}.max_states);
  return greatest_fixpoint(graph).rank[0] != 0;
}

}  // namespace sbck

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "sbck/compliance.hpp"

namespace sbck {

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::Ax: return "Ax";
    case Rule::Hyp: return "Hyp";
    case Rule::ExtInt: return "ExtInt";
    case Rule::IntExt: return "IntExt";
  }
  return "?";
}

std::string render_judgment(const Judgment& j) { return render(j.client) + " -| " + render(j.server); }

namespace {

// The rule schemas are re-derived here from the syntax alone, without the
// reduction relation or the search that produced the proof.

Past advance(const Past& past, const WellFormedBehaviour& acting) {
  return acting->checkpointed() ? Past::checkpoint(acting) : past;
}

std::set<std::string> labels_of(const Behaviour& b) {
  std::set<std::string> out;
  for (const auto& br : b.branches()) out.insert(br.label);
  return out;
}

Judgment rollback_of(const Judgment& j) {
  return {Config(Past::none(), j.client.past().behaviour()), Config(Past::none(), j.server.past().behaviour())};
}

std::optional<std::string> check_schema(const DerivationNode& n) {
  const Judgment& j = n.conclusion;
  const WellFormedBehaviour& client = j.client.current();
  const WellFormedBehaviour& server = j.server.current();
  const bool no_pasts = j.client.past().empty() && j.server.past().empty();
  const bool both_pasts = j.client.past().has_value() && j.server.past().has_value();

  std::vector<Judgment> expected;
  switch (n.rule) {
    case Rule::Hyp:
      if (!n.premises.empty()) return "Hyp has premises";
      return std::nullopt;
    case Rule::Ax:
      if (!client->is_success()) return "Ax on a client that is not 1";
      if (!no_pasts && !both_pasts) return "Ax with exactly one past set";
      if (both_pasts) expected.push_back(rollback_of(j));
      break;
    case Rule::ExtInt:
    case Rule::IntExt: {
      const bool ext_int = n.rule == Rule::ExtInt;
      const Behaviour& outputs = ext_int ? server.term() : client.term();
      const Behaviour& inputs = ext_int ? client.term() : server.term();
      if (outputs.kind() != Kind::Internal || inputs.kind() != Kind::External) {
        return std::string(to_string(n.rule)) + " on choices of the wrong polarity";
      }
      auto out_labels = labels_of(outputs);
      auto in_labels = labels_of(inputs);
      if (!std::includes(in_labels.begin(), in_labels.end(), out_labels.begin(), out_labels.end())) {
        return "an output label has no matching input";
      }
      Past client_next = advance(j.client.past(), client);
      Past server_next = advance(j.server.past(), server);
      for (const auto& l : out_labels) {
        expected.push_back({Config(client_next, branch_target(client, l)), Config(server_next, branch_target(server, l))});
      }
      if (both_pasts) expected.push_back(rollback_of(j));
      break;
    }
  }
  if (n.premises.size() != expected.size()) {
    return "expected " + std::to_string(expected.size()) + " premises, found " + std::to_string(n.premises.size());
  }
  std::vector<bool> used(expected.size(), false);
  for (const auto& p : n.premises) {
    if (!p) return "null premise";
    bool matched = false;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (!used[k] && expected[k] == p->conclusion) {
        used[k] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return "unexpected premise " + render_judgment(p->conclusion);
  }
  return std::nullopt;
}

class Verifier {
public:
  VerifyResult run(const DerivationNode& root) {
    std::unordered_set<Judgment, SystemStateHash> free;
    walk(root, "root", free);
    return result_;
  }

private:
  using JudgmentSet = std::unordered_set<Judgment, SystemStateHash>;

  bool fail(const std::string& at, std::string reason) {
    result_ = {false, at, std::move(reason)};
    return false;
  }

  bool in_scope(const Judgment& j) const {
    auto it = hyps_.find(j);
    return it != hyps_.end() && it->second > 0;
  }

  // Checks `n` under the hypotheses of the current path and adds the
  // hypotheses it relies on from outside its subtree to `free`.
  bool walk(const DerivationNode& n, const std::string& at, JudgmentSet& free) {
    if (auto it = memo_.find(&n); it != memo_.end()) {
      for (const auto& j : it->second) {
        if (!in_scope(j)) return fail(at, "hypothesis not in scope: " + render_judgment(j));
      }
      free.insert(it->second.begin(), it->second.end());
      return true;
    }
    if (auto err = check_schema(n)) return fail(at, *err);

    JudgmentSet mine;
    if (n.rule == Rule::Hyp) {
      if (!in_scope(n.conclusion)) return fail(at, "hypothesis not in scope: " + render_judgment(n.conclusion));
      mine.insert(n.conclusion);
    } else {
      const bool extends = n.rule == Rule::ExtInt || n.rule == Rule::IntExt;
      if (extends) ++hyps_[n.conclusion];
      bool ok = true;
      for (std::size_t k = 0; k < n.premises.size() && ok; ++k) {
        ok = walk(*n.premises[k], at + "." + std::to_string(k), mine);
      }
      if (extends) --hyps_[n.conclusion];
      if (!ok) return false;
      if (extends) mine.erase(n.conclusion);
    }
    free.insert(mine.begin(), mine.end());
    memo_.emplace(&n, std::move(mine));
    return true;
  }

  std::unordered_map<Judgment, int, SystemStateHash> hyps_;
  std::unordered_map<const DerivationNode*, JudgmentSet> memo_;
  VerifyResult result_;
};

void render_node(const DerivationNode& n, std::size_t indent, std::ostringstream& os) {
  os << std::string(indent * 2, ' ') << '(' << to_string(n.rule) << ") " << render_judgment(n.conclusion) << '\n';
  for (const auto& p : n.premises) render_node(*p, indent + 1, os);
}

}  // namespace

VerifyResult verify_derivation(const DerivationNode& root) { return Verifier().run(root); }

std::string render(const DerivationNode& root) {
  std::ostringstream os;
  render_node(root, 0, os);
  return os.str();
}

}  // namespace sbck

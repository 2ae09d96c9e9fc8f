#include "sbck/json.hpp"

namespace sbck {

using nlohmann::json;

json to_json(const Past& p) { return render(p); }

json to_json(const Config& c) { return {{"past", render(c.past())}, {"current", render(c.current().term())}}; }

json to_json(const Judgment& j) {
  return {{"client_past", render(j.client.past())},
          {"client", render(j.client.current().term())},
          {"server_past", render(j.server.past())},
          {"server", render(j.server.current().term())}};
}

namespace {

json label_json(const std::optional<Label>& l) {
  if (!l) return nullptr;
  return to_string(*l);
}

json state_entry(const std::optional<Label>& l, const SystemState& s) {
  return {{"label", label_json(l)}, {"client", to_json(s.client)}, {"server", to_json(s.server)}};
}

}  // namespace

json to_json(const Trace& t) {
  json out = json::array();
  for (const auto& e : t.entries) out.push_back(state_entry(e.label, e.state));
  return out;
}

json to_json(const ViolationPath& path) {
  json out = json::array();
  out.push_back(state_entry(std::nullopt, path.start));
  for (const auto& st : path.steps) out.push_back(state_entry(st.label, st.target));
  return out;
}

json to_json(const DerivationNode& root) {
  json premises = json::array();
  for (const auto& p : root.premises) premises.push_back(to_json(*p));
  return {{"rule", std::string(to_string(root.rule))}, {"judgment", to_json(root.conclusion)}, {"premises", premises}};
}

json to_json(const RuleCounts& counts) {
  return {{"Ax", counts.ax}, {"Hyp", counts.hyp}, {"ExtInt", counts.ext_int}, {"IntExt", counts.int_ext}};
}

json to_json(const Verdict& v) {
  json evidence;
  if (const Derivation* d = v.derivation()) {
    evidence = {{"kind", "derivation"}, {"tree", to_json(**d)}};
  } else if (const ViolationPath* p = v.violation()) {
    evidence = {{"kind", "path"}, {"steps", to_json(*p)}};
  } else {
    evidence = {{"kind", "none"}};
  }
  return {{"compliant", v.compliant},
          {"rule_counts", to_json(v.rule_counts)},
          {"evidence", evidence},
          {"states_explored", v.states_explored}};
}

}  // namespace sbck

#include "sbck/lts.hpp"

#include <algorithm>
#include <sstream>

#include "trusted.hpp"

namespace sbck {

Past Past::checkpoint(WellFormedBehaviour b) {
  if (!b->is_choice() || !b->checkpointed()) {
    throw std::invalid_argument("a past must be a checkpointed choice, got " + render(b.term()));
  }
  Past p;
  p.target_ = std::move(b);
  return p;
}

Config::Config(Past past, WellFormedBehaviour current) : past_(std::move(past)), current_(unfold(current)) {}

std::size_t Config::hash() const { return past_.hash() * 0x100000001b3ULL ^ current_.term().hash(); }

std::size_t SystemState::hash() const { return client.hash() * 0x9e3779b97f4a7c15ULL + server.hash(); }

bool same_action(const Label& a, const Label& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Label::Kind::Tau || a.kind == Label::Kind::Rbk) return true;
  return a.name == b.name;
}

std::string to_string(const Label& l) {
  switch (l.kind) {
    case Label::Kind::Input: return l.name;
    case Label::Kind::Output: return "!" + l.name;
    case Label::Kind::Tau: return l.name.empty() ? "tau" : "tau:" + l.name;
    case Label::Kind::Rbk: return "rbk";
  }
  return "?";
}

SystemState initial_state(const WellFormedBehaviour& client, const WellFormedBehaviour& server) {
  return {Config(Past::none(), client), Config(Past::none(), server)};
}

namespace {

std::set<std::string> labels_if(const Behaviour& b, Kind kind) {
  std::set<std::string> out;
  Behaviour head = unfold(b);
  if (head.kind() == kind) {
    for (const auto& br : head.branches()) out.insert(br.label);
  }
  return out;
}

}  // namespace

std::set<std::string> sum_acts(const Behaviour& b) { return labels_if(b, Kind::External); }
std::set<std::string> oplus_acts(const Behaviour& b) { return labels_if(b, Kind::Internal); }

Past checkpoint_update(const Past& past, const WellFormedBehaviour& b) {
  WellFormedBehaviour head = unfold(b);
  if (head->is_choice() && head->checkpointed()) return Past::checkpoint(head);
  return past;
}

std::vector<ConfigStep> config_steps(const Config& c) {
  std::vector<ConfigStep> steps;
  const WellFormedBehaviour& cur = c.current();
  if (cur->is_choice()) {
    Past next_past = checkpoint_update(c.past(), cur);
    bool output = cur->kind() == Kind::Internal;
    std::vector<const Branch*> sorted;
    for (const auto& br : cur->branches()) sorted.push_back(&br);
    std::sort(sorted.begin(), sorted.end(), [](const Branch* a, const Branch* b) { return a->label < b->label; });
    for (const Branch* br : sorted) {
      steps.push_back({output ? Label::output(br->label) : Label::input(br->label),
                       Config(next_past, branch_target(cur, br->label))});
    }
  }
  if (c.past().has_value()) {
    steps.push_back({Label::rbk(), Config(Past::none(), c.past().behaviour())});
  }
  return steps;
}

namespace {

bool includes(const std::set<std::string>& small, const std::set<std::string>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Synchronisations where `in_side` inputs and `out_side` outputs; the
// result lists (name, input target, output target).
struct Sync {
  std::string name;
  Config in_target;
  Config out_target;
};

std::vector<Sync> synchronisations(const Config& in_side, const Config& out_side) {
  std::vector<Sync> out;
  if (in_side.current()->kind() != Kind::External || out_side.current()->kind() != Kind::Internal) return out;
  if (!includes(oplus_acts(out_side.current()), sum_acts(in_side.current()))) return out;
  auto ins = config_steps(in_side);
  auto outs = config_steps(out_side);
  for (const auto& o : outs) {
    if (o.label.kind != Label::Kind::Output) continue;
    for (const auto& i : ins) {
      if (i.label.kind == Label::Kind::Input && i.label.name == o.label.name) {
        out.push_back({o.label.name, i.target, o.target});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<PairStep> pair_steps(const SystemState& s) {
  std::vector<PairStep> steps;
  for (auto& sync : synchronisations(s.client, s.server)) {
    steps.push_back({Label::tau(sync.name), {std::move(sync.in_target), std::move(sync.out_target)}});
  }
  for (auto& sync : synchronisations(s.server, s.client)) {
    steps.push_back({Label::tau(sync.name), {std::move(sync.out_target), std::move(sync.in_target)}});
  }
  if (s.client.past().has_value() && s.server.past().has_value()) {
    steps.push_back({Label::rbk(),
                     {Config(Past::none(), s.client.past().behaviour()),
                      Config(Past::none(), s.server.past().behaviour())}});
  }
  return steps;
}

bool has_tau_step(const SystemState& s) {
  auto enabled = [](const Config& in, const Config& out) {
    const Behaviour& i = in.current();
    const Behaviour& o = out.current();
    return i.kind() == Kind::External && o.kind() == Kind::Internal && includes(oplus_acts(o), sum_acts(i));
  };
  return enabled(s.client, s.server) || enabled(s.server, s.client);
}

Directive Directive::parse(std::string_view text) {
  if (text == "rbk") return {Kind::Rbk, {}};
  if (text == "tau:any") return {Kind::TauAny, {}};
  if (text.substr(0, 4) == "tau:" && is_valid_name(text.substr(4))) {
    return {Kind::Tau, std::string(text.substr(4))};
  }
  throw std::invalid_argument("bad directive '" + std::string(text) + "' (expected tau:<name>, tau:any or rbk)");
}

std::string Directive::str() const {
  switch (kind) {
    case Kind::Tau: return "tau:" + name;
    case Kind::TauAny: return "tau:any";
    case Kind::Rbk: return "rbk";
  }
  return "?";
}

std::vector<Directive> parse_script(std::string_view text) {
  std::vector<Directive> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(Directive::parse(word));
    word.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      flush();
    } else {
      word += c;
    }
  }
  flush();
  return out;
}

Trace run_trace(const SystemState& start, const std::vector<Directive>& script) {
  Trace trace;
  trace.entries.push_back({std::nullopt, start});
  SystemState cur = start;
  for (const auto& d : script) {
    auto steps = pair_steps(cur);
    auto match = std::find_if(steps.begin(), steps.end(), [&](const PairStep& st) {
      switch (d.kind) {
        case Directive::Kind::Rbk: return st.label.is_rbk();
        case Directive::Kind::TauAny: return st.label.is_tau();
        case Directive::Kind::Tau: return st.label.is_tau() && st.label.name == d.name;
      }
      return false;
    });
    if (match == steps.end()) {
      std::string enabled;
      for (const auto& st : steps) enabled += (enabled.empty() ? "" : ", ") + to_string(st.label);
      trace.error = d.str() + " not enabled (enabled: " + (enabled.empty() ? "none" : enabled) + ")";
      return trace;
    }
    cur = match->target;
    trace.entries.push_back({match->label, cur});
  }
  return trace;
}

std::string render(const Past& p) { return p.empty() ? "o" : render(p.behaviour().term()); }

std::string render(const Config& c) { return render(c.past()) + " < " + render(c.current().term()); }

std::string render(const SystemState& s) { return render(s.client) + " || " + render(s.server); }

std::string render(const Trace& t) {
  std::ostringstream os;
  for (const auto& e : t.entries) {
    if (e.label) {
      std::string name = e.label->is_rbk() ? "rbk" : e.label->name;
      os << "--" << name << "--> ";
    }
    os << render(e.state) << '\n';
  }
  if (t.error) os << "error: " << *t.error << '\n';
  return os.str();
}

}  // namespace sbck

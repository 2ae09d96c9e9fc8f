#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sbck/compliance.hpp"
#include "sbck/json.hpp"
#include "sbck/lts.hpp"
#include "sbck/syntax.hpp"
#include "sbck/testkit.hpp"

namespace sbck::cli {

namespace {

using nlohmann::json;

// Raised for problems with the command line or its inputs.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> inputs;
  bool inline_terms = false;
  bool json = false;
  bool derivation = false;
  bool trace = false;
  bool ci = false;
  std::size_t max_states = 100000;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::string script;
  std::string which = "all";
  std::optional<std::size_t> exhaustive;
  std::size_t depth = 5;
  std::size_t branches = 3;
  std::string alphabet = "a,b,c,d";
  double p_checkpoint = 0.3;
  double p_rec = 0.15;
};

bool color_enabled() {
  const char* v = std::getenv("SB_COLOR");
  return v != nullptr && std::string(v) == "1";
}

std::string paint(const std::string& word, bool good) {
  if (!color_enabled()) return word;
  return std::string(good ? "\x1b[32m" : "\x1b[31m") + word + "\x1b[0m";
}

std::string verdict_word(bool compliant) { return paint(compliant ? "compliant" : "non-compliant", compliant); }

class Session {
public:
  Session(const Options& o, std::istream& in, std::ostream& out, std::ostream& err)
      : o_(o), in_(in), out_(out), err_(err) {}

  WellFormedBehaviour load(const std::string& arg) {
    std::string origin;
    std::string text;
    if (o_.inline_terms) {
      origin = "<inline>";
      text = arg;
    } else if (arg == "-") {
      if (stdin_used_) throw UsageError("stdin can only be read once");
      stdin_used_ = true;
      origin = "<stdin>";
      text.assign(std::istreambuf_iterator<char>(in_), {});
    } else {
      std::ifstream f(arg, std::ios::binary);
      if (!f) throw UsageError("cannot read " + arg);
      origin = arg;
      text.assign(std::istreambuf_iterator<char>(f), {});
    }
    try {
      return parse(text);
    } catch (const SyntaxError& e) {
      throw UsageError(origin + ":" + e.what());
    }
  }

  std::vector<WellFormedBehaviour> load_all(std::size_t expected) {
    if (o_.inputs.size() != expected) {
      throw UsageError("expected " + std::to_string(expected) + " behaviour argument" + (expected == 1 ? "" : "s") +
                       ", got " + std::to_string(o_.inputs.size()));
    }
    std::vector<WellFormedBehaviour> out;
    for (const auto& a : o_.inputs) out.push_back(load(a));
    return out;
  }

  CheckOptions check_options() const { return {o_.max_states}; }

  void print_path(const ViolationPath& path) {
    Trace t;
    t.entries.push_back({std::nullopt, path.start});
    for (const auto& st : path.steps) t.entries.push_back({st.label, st.target});
    out_ << render(t);
  }

  int check() {
    auto b = load_all(2);
    Verdict v = check_axiomatic(b[0], b[1], check_options());
    if (o_.json) {
      out_ << to_json(v).dump(2) << '\n';
      return v.compliant ? kOk : kNegative;
    }
    out_ << verdict_word(v.compliant) << '\n';
    if (const Derivation* d = v.derivation(); d && o_.derivation) out_ << render(**d);
    if (const ViolationPath* p = v.violation()) {
      out_ << "refused at " << render(p->end()) << '\n';
      if (o_.trace) print_path(*p);
    }
    return v.compliant ? kOk : kNegative;
  }

  int oracle() {
    auto b = load_all(2);
    Verdict v = check_gfp_oracle(b[0], b[1], check_options());
    bool agrees = check_axiomatic(b[0], b[1], check_options()).compliant == v.compliant;
    if (o_.json) {
      json j = to_json(v);
      j["axiomatic_agrees"] = agrees;
      out_ << j.dump(2) << '\n';
    } else {
      out_ << verdict_word(v.compliant) << " (" << v.states_explored << " states)\n";
      out_ << "axiomatic checker: " << paint(agrees ? "agrees" : "disagrees", agrees) << '\n';
      if (const ViolationPath* p = v.violation()) {
        out_ << "violation at " << render(p->end()) << '\n';
        if (o_.trace) print_path(*p);
      }
    }
    if (!agrees) err_ << "error: the axiomatic checker and the oracle disagree\n";
    return v.compliant && agrees ? kOk : kNegative;
  }

  int standard() {
    auto b = load_all(2);
    for (std::size_t k = 0; k < 2; ++k) {
      if (has_checkpoint(b[k].term())) throw UsageError(o_.inputs[k] + ": contains checkpoints; run erase first");
    }
    bool ok = check_standard(b[0], b[1], check_options());
    if (o_.json) {
      out_ << json{{"compliant", ok}}.dump(2) << '\n';
    } else {
      out_ << verdict_word(ok) << '\n';
    }
    return ok ? kOk : kNegative;
  }

  int transform(WellFormedBehaviour (*f)(const WellFormedBehaviour&)) {
    auto b = load_all(1);
    std::string text = render(f(b[0]).term());
    if (o_.json) {
      out_ << json{{"behaviour", text}}.dump(2) << '\n';
    } else {
      out_ << text << '\n';
    }
    return kOk;
  }

  int simulate() {
    auto b = load_all(2);
    std::vector<Directive> script;
    try {
      script = parse_script(o_.script);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("bad script: ") + e.what());
    }
    Trace t = run_trace(initial_state(b[0], b[1]), script);
    if (o_.json) {
      out_ << to_json(t).dump(2) << '\n';
      if (t.error) err_ << "error: " << *t.error << '\n';
    } else {
      out_ << render(t);
    }
    return t.ok() ? kOk : kNegative;
  }

  std::uint64_t seed() {
    if (o_.seed) return *o_.seed;
    if (o_.ci) throw UsageError("--seed is required with --ci");
    std::uint64_t s = std::random_device{}();
    s = (s << 32) ^ std::random_device{}();
    err_ << "seed: " << s << '\n';
    return s;
  }

  testkit::GenParams params() {
    testkit::GenParams p;
    p.max_depth = o_.depth;
    p.max_branches = o_.branches;
    p.alphabet = split(o_.alphabet);
    p.p_checkpoint = o_.p_checkpoint;
    p.p_rec = o_.p_rec;
    p.seed = seed();
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return p;
  }

  int gen() {
    if (!o_.inputs.empty()) throw UsageError("gen takes no behaviour arguments");
    testkit::GenParams p = params();
    testkit::Rng rng(p.seed);
    std::size_t n = o_.n.value_or(1);
    json all = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      std::string text = render(testkit::gen_behaviour(p, rng).term());
      if (o_.json) {
        all.push_back(text);
      } else {
        out_ << text << '\n';
      }
    }
    if (o_.json) out_ << all.dump(2) << '\n';
    return kOk;
  }

  int props() {
    if (!o_.inputs.empty()) throw UsageError("props takes no behaviour arguments");
    static const std::vector<std::string> known{"duality", "conservativity", "equivalence", "evidence", "all"};
    if (std::find(known.begin(), known.end(), o_.which) == known.end()) {
      throw UsageError("unknown property '" + o_.which + "'");
    }
    auto wants = [&](const char* name) { return o_.which == "all" || o_.which == name; };
    std::vector<testkit::PropertyReport> reports;
    if (o_.exhaustive) {
      if (*o_.exhaustive > 3) throw UsageError("--exhaustive depth must be at most 3");
      if (o_.seed || o_.n) err_ << "note: --seed and --n are ignored in exhaustive mode\n";
      std::string alphabet = o_.alphabet == Options{}.alphabet ? "a,b" : o_.alphabet;
      auto terms = testkit::enumerate_behaviours(*o_.exhaustive, split(alphabet), false);
      if (wants("duality")) reports.push_back(testkit::exhaustive_duality(terms));
      if (wants("conservativity")) reports.push_back(testkit::exhaustive_conservativity(terms));
      if (wants("equivalence")) reports.push_back(testkit::exhaustive_checker_equivalence(terms));
      if (o_.which == "evidence") throw UsageError("evidence has no exhaustive mode");
    } else {
      testkit::GenParams p = params();
      std::size_t n = o_.n.value_or(1000);
      if (wants("duality")) reports.push_back(testkit::prop_duality(n, p));
      if (wants("conservativity")) reports.push_back(testkit::prop_conservativity(n, p));
      if (wants("equivalence")) reports.push_back(testkit::prop_checker_equivalence(n, p));
      if (wants("evidence")) reports.push_back(testkit::prop_evidence(n, p));
    }
    bool passed = true;
    json all = json::array();
    for (const auto& r : reports) {
      passed = passed && r.passed();
      if (o_.json) {
        all.push_back(testkit::to_json(r));
      } else {
        out_ << testkit::to_text(r);
      }
    }
    if (o_.json) out_ << all.dump(2) << '\n';
    return passed ? kOk : kNegative;
  }

private:
  static std::vector<std::string> split(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  const Options& o_;
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
  bool stdin_used_ = false;
};

void add_inputs(CLI::App* cmd, Options& o, const std::string& what) {
  cmd->add_option("inputs", o.inputs, what);
  cmd->add_flag("-e,--expr", o.inline_terms, "Treat the arguments as terms instead of file names");
  cmd->add_flag("--json", o.json, "Machine-readable output");
}

void add_check_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--max-states", o.max_states, "State cap")->check(CLI::PositiveNumber);
  cmd->add_flag("--trace", o.trace, "Print the violating reduction path");
}

void add_gen_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--n", o.n, "Number of samples or trials");
  cmd->add_flag("--ci", o.ci, "Require an explicit --seed");
  cmd->add_option("--depth", o.depth, "Maximum choice depth");
  cmd->add_option("--branches", o.branches, "Maximum branches per choice");
  cmd->add_option("--alphabet", o.alphabet, "Comma separated names");
  cmd->add_option("--p-checkpoint", o.p_checkpoint, "Probability of a checkpoint on a choice");
  cmd->add_option("--p-rec", o.p_rec, "Probability of wrapping a choice in rec");
  cmd->add_flag("--json", o.json, "Machine-readable output");
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Session behaviours with checkpoints", "sbck"};
  app.require_subcommand(1, 1);

  auto* check = app.add_subcommand("check", "Decide checkpoint compliance with the proof system");
  add_inputs(check, o, "Client and server");
  add_check_flags(check, o);
  check->add_flag("--derivation", o.derivation, "Print the derivation of a compliant pair");

  auto* oracle = app.add_subcommand("oracle", "Decide checkpoint compliance by greatest fixpoint");
  add_inputs(oracle, o, "Client and server");
  add_check_flags(oracle, o);

  auto* standard = app.add_subcommand("standard", "Decide compliance of checkpoint-free behaviours");
  add_inputs(standard, o, "Client and server");
  standard->add_option("--max-states", o.max_states, "State cap")->check(CLI::PositiveNumber);

  auto* dual_cmd = app.add_subcommand("dual", "Print the dual behaviour");
  add_inputs(dual_cmd, o, "Behaviour");
  auto* erase_cmd = app.add_subcommand("erase", "Print the behaviour without checkpoints");
  add_inputs(erase_cmd, o, "Behaviour");
  auto* fmt = app.add_subcommand("fmt", "Print the behaviour in canonical form");
  add_inputs(fmt, o, "Behaviour");

  auto* simulate = app.add_subcommand("simulate", "Run a script of pair steps");
  add_inputs(simulate, o, "Client and server");
  simulate->add_option("--script", o.script, "Directives: tau:<name>, tau:any or rbk, comma separated");

  auto* gen = app.add_subcommand("gen", "Print random well-formed behaviours");
  add_gen_flags(gen, o);

  auto* props = app.add_subcommand("props", "Run property suites");
  props->add_option("which", o.which, "duality, conservativity, equivalence, evidence or all");
  props->add_option("--exhaustive", o.exhaustive, "Enumerate all terms up to this depth instead of sampling");
  add_gen_flags(props, o);

  std::vector<const char*> argv{"sbck"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0 inside CLI11.
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  Session s(o, in, out, err);
  try {
    if (check->parsed()) return s.check();
    if (oracle->parsed()) return s.oracle();
    if (standard->parsed()) return s.standard();
    if (dual_cmd->parsed()) return s.transform([](const WellFormedBehaviour& b) { return dual(b); });
    if (erase_cmd->parsed()) return s.transform([](const WellFormedBehaviour& b) { return erase(b); });
    if (fmt->parsed()) return s.transform([](const WellFormedBehaviour& b) { return b; });
    if (simulate->parsed()) return s.simulate();
    if (gen->parsed()) return s.gen();
    if (props->parsed()) return s.props();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const StateCapExceeded& e) {
    err << "error: " << e.what() << " (raise --max-states)\n";
    return kCap;
  }
  return kUsage;
}

}  // namespace sbck::cli

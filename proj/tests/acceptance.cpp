// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "sbck/compliance.hpp"
#include "sbck/lts.hpp"
#include "sbck/syntax.hpp"
#include "sbck/testkit.hpp"

using namespace sbck;
using namespace sbck::testkit;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 20240601;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d. %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string first_failure(const PropertyReport& r) {
  if (r.failures.empty()) return "";
  const Failure& f = r.failures.front();
  return "; first: seed=" + std::to_string(f.seed) + " " + f.client + " vs " + f.server + " (" + f.detail + ")";
}

Outcome worked_examples() {
  auto t0 = Clock::now();
  auto rho = parse("sea.(house + bung) + mount.house");
  struct Case {
    const char* what;
    bool got;
    bool want;
  };
  Case cases[] = {
      {"rho vs dual", check_axiomatic(rho, dual(rho)).compliant, true},
      {"rho vs mount server (standard)", check_standard(rho, parse("!mount.(!house (+) !bung)")), false},
      {"a vs !a (+) !b", check_axiomatic(parse("a"), parse("!a (+) !b")).compliant, false},
      {"garden pair",
       check_axiomatic(parse("^(sea.house.garden + house.garden)"), parse("^(!sea.^(!house.!garden) (+) !house.!garden)"))
           .compliant,
       true},
      {"unfair server", check_axiomatic(parse("sea.house.mount.house"), parse("!sea.^(!house.!mount.!house)")).compliant,
       false},
  };
  double elapsed = seconds_since(t0);
  std::string bad;
  for (const auto& c : cases) {
    if (c.got != c.want) bad += std::string(bad.empty() ? "" : ", ") + c.what;
  }
  bool fast = elapsed < 1.0;
  std::ostringstream os;
  os << "5 fixtures, " << (bad.empty() ? "all as expected" : "wrong: " + bad) << ", " << elapsed * 1000 << " ms (< 1 s)";
  return {bad.empty() && fast, os.str()};
}

GenParams defaults() {
  GenParams p;
  p.seed = kSeed;
  return p;
}

Outcome property(const PropertyReport& r, double limit_s, std::size_t min_antecedents = 0) {
  double s = static_cast<double>(r.elapsed.count()) / 1000.0;
  std::size_t checked = r.trials - r.skipped;
  std::ostringstream os;
  os << "trials=" << r.trials << " skipped=" << r.skipped << " failures=" << r.failures.size();
  if (min_antecedents) os << " antecedents=" << checked << " (>= " << min_antecedents << ")";
  os << ", " << s << " s (< " << limit_s << " s)" << first_failure(r);
  return {r.passed() && s < limit_s && checked >= min_antecedents, os.str()};
}

Outcome equivalence() {
  auto t0 = Clock::now();
  PropertyReport sampled = prop_checker_equivalence(1000, defaults());
  auto flat = enumerate_behaviours(2, {"a", "b"}, false);
  PropertyReport exhaustive = exhaustive_checker_equivalence(flat);
  auto recursive = enumerate_behaviours(1, {"a", "b"}, true);
  PropertyReport with_rec = exhaustive_checker_equivalence(recursive);
  double elapsed = seconds_since(t0);
  std::ostringstream os;
  os << "sampled " << sampled.trials << " with " << sampled.failures.size() << " disagreements; exhaustive depth<=2 "
     << exhaustive.trials << " pairs with " << exhaustive.failures.size() << "; with rec depth<=1 " << with_rec.trials
     << " pairs with " << with_rec.failures.size() << "; " << elapsed << " s (< 300 s)" << first_failure(sampled)
     << first_failure(exhaustive) << first_failure(with_rec);
  return {sampled.passed() && exhaustive.passed() && with_rec.passed() && elapsed < 300.0, os.str()};
}

Outcome evidence() {
  PropertyReport sampled = prop_evidence(1000, defaults());
  // And every pair of small recursive terms.
  auto terms = enumerate_behaviours(1, {"a", "b"}, true);
  std::size_t derivations = 0, paths = 0, bad = 0;
  for (const auto& c : terms) {
    for (const auto& s : terms) {
      for (const Verdict& v : {check_axiomatic(c, s), check_gfp_oracle(c, s)}) {
        if (const Derivation* d = v.derivation()) {
          ++derivations;
          bad += !verify_derivation(**d).ok;
        } else if (const ViolationPath* p = v.violation()) {
          ++paths;
          bad += !replay_violation(*p);
        } else if (!v.compliant) {
          ++bad;
        }
      }
    }
  }
  std::ostringstream os;
  os << "sampled " << sampled.trials << " pairs with " << sampled.failures.size() << " bad; enumerated "
     << derivations << " derivations and " << paths << " paths with " << bad << " bad" << first_failure(sampled);
  return {sampled.passed() && bad == 0, os.str()};
}

// A config over a generated behaviour: a closure state as current and,
// half the time, a checkpointed closure state as past.
Config random_config(const GenParams& p, Rng& rng) {
  StateClosure cl = state_closure(gen_behaviour(p, rng));
  std::vector<WellFormedBehaviour> cks;
  for (const auto& s : cl.states) {
    if (s->checkpointed()) cks.push_back(s);
  }
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  WellFormedBehaviour current = cl.states[pick(cl.size())];
  Past past = Past::none();
  if (!cks.empty() && std::bernoulli_distribution(0.5)(rng)) past = Past::checkpoint(cks[pick(cks.size())]);
  return Config(past, current);
}

std::string semantics_violation(const Config& c) {
  auto steps = config_steps(c);
  std::size_t rbk = 0;
  std::set<std::string> names;
  const Behaviour& head = c.current().term();
  for (const auto& st : steps) {
    if (st.label.is_rbk()) {
      ++rbk;
      if (!st.target.past().empty()) return "rbk target keeps a past";
      if (!(st.target.current() == unfold(c.past().behaviour()))) return "rbk target is not the past";
      continue;
    }
    bool want_input = head.kind() == Kind::External;
    if (st.label.kind != (want_input ? Label::Kind::Input : Label::Kind::Output)) return "forward label polarity";
    names.insert(st.label.name);
    if (head.checkpointed() && !(st.target.past() == Past::checkpoint(c.current()))) return "checkpoint not stored";
    if (!head.checkpointed() && !(st.target.past() == c.past())) return "past changed without checkpoint";
  }
  if ((rbk == 1) != c.past().has_value() || rbk > 1) return "rbk enabled iff past set";
  std::set<std::string> labels;
  for (const auto& br : head.branches()) labels.insert(br.label);
  if (names != labels || steps.size() - rbk != head.branches().size()) return "branch bijection";
  return "";
}

std::string pair_violation(const SystemState& s) {
  auto has_rbk = [](const Config& c) {
    for (const auto& st : config_steps(c)) {
      if (st.label.is_rbk()) return true;
    }
    return false;
  };
  std::size_t rbk = 0;
  for (const auto& st : pair_steps(s)) {
    if (st.label.is_rbk()) {
      ++rbk;
      continue;
    }
    const Behaviour& cl = s.client.current().term();
    const Behaviour& sv = s.server.current().term();
    bool rule1 = cl.kind() == Kind::External && sv.kind() == Kind::Internal;
    bool rule2 = cl.kind() == Kind::Internal && sv.kind() == Kind::External;
    const Behaviour& in = rule1 ? cl : sv;
    const Behaviour& out = rule1 ? sv : cl;
    if (!rule1 && !rule2) return "tau between same polarities";
    auto offered = sum_acts(in);
    auto chosen = oplus_acts(out);
    if (!std::includes(offered.begin(), offered.end(), chosen.begin(), chosen.end())) return "side condition";
    if (!chosen.count(st.label.name)) return "tau on a label not chosen";
  }
  if ((rbk == 1) != (has_rbk(s.client) && has_rbk(s.server))) return "pair rbk synchrony";
  return "";
}

Outcome semantics() {
  GenParams p = defaults();
  Rng rng(kSeed ^ 0x5eed);
  std::size_t with_past = 0;
  for (int i = 0; i < 10000; ++i) {
    Config c = random_config(p, rng);
    Config d = random_config(p, rng);
    // Make pair steps likely: sometimes pair with a dual state.
    if (i % 2 == 0) d = Config(d.past(), dual(c.current()));
    with_past += c.past().has_value();
    for (const Config* x : {&c, &d}) {
      if (std::string v = semantics_violation(*x); !v.empty()) return {false, v + " at " + render(*x)};
    }
    SystemState s{c, d};
    if (std::string v = pair_violation(s); !v.empty()) return {false, v + " at " + render(s)};
  }
  return {true, "10000 configs and pairs, " + std::to_string(with_past) + " client configs with a past"};
}

Outcome syntax() {
  GenParams p = defaults();
  Rng rng(kSeed ^ 0x7e57);
  for (int i = 0; i < 10000; ++i) {
    WellFormedBehaviour b = gen_behaviour(p, rng);
    if (!dual(dual(b)).term().identical(b.term())) return {false, "dual not involutive on " + render(b.term())};
    if (!(erase(dual(b)) == dual(erase(b)))) return {false, "erase/dual do not commute on " + render(b.term())};
    if (!parse(render(b.term())).term().identical(b.term())) return {false, "round trip fails on " + render(b.term())};
  }
  return {true, "10000 terms"};
}

// Pasts range over the checkpointed closure states plus the empty past.
std::size_t judgment_universe(const WellFormedBehaviour& c, const WellFormedBehaviour& s) {
  auto side = [](const WellFormedBehaviour& b) {
    auto cl = state_closure(b);
    return cl.size() * (1 + cl.checkpointed_count());
  };
  return side(c) * side(s);
}

Outcome performance() {
  std::vector<std::pair<WellFormedBehaviour, WellFormedBehaviour>> pairs;
  const char* fixed[][2] = {
      {"rec x. a.x", "rec y. !a.y"},
      {"sea.(house + bung) + mount.house", "!sea.(!house (+) !bung) (+) !mount.!house"},
      {"^(sea.house.garden + house.garden)", "^(!sea.^(!house.!garden) (+) !house.!garden)"},
      {"sea.house.mount.house", "!sea.^(!house.!mount.!house)"},
      {"rec x. ^(a.x + b.rec y. ^(c.y + d.x))", "rec x. ^(!a.x (+) !b.rec y. ^(!c.y (+) !d.x))"},
  };
  for (const auto& f : fixed) pairs.emplace_back(parse(f[0]), parse(f[1]));
  // Generated pairs within a judgment universe of 10^4; the 200 with the
  // largest reachable graphs are timed.
  GenParams p = defaults();
  p.p_rec = 0.3;
  Rng rng(kSeed ^ 0xbeef);
  std::vector<std::pair<std::size_t, std::pair<WellFormedBehaviour, WellFormedBehaviour>>> candidates;
  for (int i = 0; i < 4000; ++i) {
    p.max_depth = 3 + i % 7;
    WellFormedBehaviour c = gen_behaviour(p, rng);
    WellFormedBehaviour s = std::bernoulli_distribution(0.5)(rng) ? dual(c) : mutate(dual(c), p, rng);
    if (judgment_universe(c, s) > 10000) continue;
    candidates.push_back({explore(initial_state(c, s), 10000).states.size(), {c, s}});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i < std::min<std::size_t>(200, candidates.size()); ++i) pairs.push_back(candidates[i].second);
  double worst_ax = 0, worst_gfp = 0;
  std::size_t biggest = 0, most_explored = 0;
  for (const auto& [c, s] : pairs) {
    biggest = std::max(biggest, judgment_universe(c, s));
    auto t0 = Clock::now();
    most_explored = std::max(most_explored, check_axiomatic(c, s).states_explored);
    worst_ax = std::max(worst_ax, seconds_since(t0));
    t0 = Clock::now();
    check_gfp_oracle(c, s);
    worst_gfp = std::max(worst_gfp, seconds_since(t0));
  }
  std::ostringstream os;
  os << pairs.size() << " pairs, largest judgment universe " << biggest << ", most judgments explored "
     << most_explored << ", slowest axiomatic " << worst_ax * 1000
     << " ms, slowest oracle " << worst_gfp * 1000 << " ms (each < 1 s)";
  return {worst_ax < 1.0 && worst_gfp < 1.0, os.str()};
}

}  // namespace

int main() {
  report(1, "worked examples", worked_examples);
  report(2, "duality", [] { return property(prop_duality(1000, defaults()), 60.0); });
  report(3, "conservativity", [] { return property(prop_conservativity(1000, defaults()), 60.0, 50); });
  report(4, "checker equivalence", equivalence);
  report(5, "evidence integrity", evidence);
  report(6, "semantics invariants", semantics);
  report(7, "syntax invariants", syntax);
  report(8, "termination and performance", performance);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

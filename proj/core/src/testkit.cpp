#include "sbck/testkit.hpp"

#include <algorithm>
#include <sstream>

namespace sbck::testkit {

namespace {

using Clock = std::chrono::steady_clock;

struct Fixture {
  const char* client;
  const char* server;
};

// Worked examples from the introduction of the calculus.
constexpr const char* kHoliday = "sea.(house + bung) + mount.house";
constexpr const char* kHolidayServer = "^(!sea.^(!house (+) !bung) (+) !mount.!house)";
constexpr Fixture kPinnedPairs[] = {
    {"sea.(house + bung) + mount.house", "!sea.(!house (+) !bung) (+) !mount.!house"},
    {"sea.(house + bung) + mount.house", "!mount.(!house (+) !bung)"},
    {"a", "!a (+) !b"},
    {"^(sea.house.garden + house.garden)", "^(!sea.^(!house.!garden) (+) !house.!garden)"},
    {"sea.house.mount.house", "!sea.^(!house.!mount.!house)"},
    {"rec x. a.x", "rec y. !a.y"},
};

std::string binder_name(std::size_t depth) {
  static const char* names[] = {"x", "y", "z", "w"};
  if (depth < 4) return names[depth];
  return "x" + std::to_string(depth);
}

class Generator {
public:
  Generator(const GenParams& p, Rng& rng) : p_(p), rng_(rng) {}

  Behaviour top() { return term(p_.max_depth, 0, true); }

private:
  bool chance(double prob) { return std::bernoulli_distribution(prob)(rng_); }
  std::size_t pick(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }

  Behaviour leaf(std::size_t binders) {
    if (binders > 0 && chance(0.35)) return Behaviour::var(static_cast<std::uint32_t>(pick(0, binders - 1)));
    return Behaviour::success();
  }

  Behaviour term(std::size_t depth_left, std::size_t binders, bool top) {
    if (depth_left == 0) return top ? Behaviour::success() : leaf(binders);
    if (chance(top ? 0.05 : 0.2)) return top ? Behaviour::success() : leaf(binders);
    if (chance(p_.p_rec)) return Behaviour::rec(binder_name(binders), choice(depth_left, binders + 1));
    return choice(depth_left, binders);
  }

  Behaviour choice(std::size_t depth_left, std::size_t binders) {
    Kind kind = chance(0.5) ? Kind::External : Kind::Internal;
    bool ck = chance(p_.p_checkpoint);
    std::size_t most = std::min(p_.max_branches, p_.alphabet.size());
    std::size_t k = pick(1, most);
    std::vector<std::string> labels = p_.alphabet;
    std::shuffle(labels.begin(), labels.end(), rng_);
    labels.resize(k);
    std::vector<Branch> branches;
    for (auto& l : labels) branches.push_back({std::move(l), term(depth_left - 1, binders, false)});
    return Behaviour::choice(kind, std::move(branches), ck);
  }

  const GenParams& p_;
  Rng& rng_;
};

// Rebuilds `b` with the choice node number `target` (preorder over choice
// nodes) replaced by `edit(node)`.
class ChoiceEditor {
public:
  using Edit = std::function<Behaviour(const Behaviour&)>;
  ChoiceEditor(std::size_t target, Edit edit) : target_(target), edit_(std::move(edit)) {}

  Behaviour apply(const Behaviour& b) {
    switch (b.kind()) {
      case Kind::Success:
      case Kind::Var:
        return b;
      case Kind::Rec:
        return Behaviour::rec(b.hint(), apply(b.body()));
      case Kind::External:
      case Kind::Internal: {
        if (seen_++ == target_) return edit_(b);
        std::vector<Branch> branches;
        for (const auto& br : b.branches()) branches.push_back({br.label, apply(br.next)});
        return Behaviour::choice(b.kind(), std::move(branches), b.checkpointed());
      }
    }
    return b;
  }

private:
  std::size_t target_;
  Edit edit_;
  std::size_t seen_ = 0;
};

void collect_choices(const Behaviour& b, std::vector<Behaviour>& out) {
  switch (b.kind()) {
    case Kind::Success:
    case Kind::Var:
      return;
    case Kind::Rec:
      collect_choices(b.body(), out);
      return;
    case Kind::External:
    case Kind::Internal:
      out.push_back(b);
      for (const auto& br : b.branches()) collect_choices(br.next, out);
      return;
  }
}

Behaviour drop_branch(const Behaviour& c, std::size_t j) {
  std::vector<Branch> branches(c.branches().begin(), c.branches().end());
  branches.erase(branches.begin() + static_cast<std::ptrdiff_t>(j));
  return Behaviour::choice(c.kind(), std::move(branches), c.checkpointed());
}

WellFormedBehaviour edited(const WellFormedBehaviour& b, std::size_t target, const ChoiceEditor::Edit& edit) {
  ChoiceEditor editor(target, edit);
  return WellFormedBehaviour::validate(editor.apply(b.term()));
}

struct Timer {
  Clock::time_point start = Clock::now();
  std::chrono::milliseconds elapsed() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  }
};

Failure make_failure(std::uint64_t seed, const Pair& pair, std::string detail) {
  return {seed, render(pair.client.term()), render(pair.server.term()), std::move(detail)};
}

// Runs `fails` (returns a nonempty detail on failure) on a pair, shrinking
// the pair before recording it.
void record(PropertyReport& report, std::uint64_t seed, const Pair& pair,
            const std::function<std::string(const Pair&)>& fails) {
  std::string detail = fails(pair);
  if (detail.empty()) return;
  Pair small = shrink_pair(pair, [&](const Pair& q) { return !fails(q).empty(); });
  report.failures.push_back(make_failure(seed, small, detail));
}

// Returns "" when the property holds, "skip" when its antecedent fails.
std::string conservativity_detail(const Pair& pair) {
  if (!check_axiomatic(pair.client, pair.server).compliant) return "skip";
  if (check_standard(erase(pair.client), erase(pair.server))) return "";
  return "checkpoint compliant but erasures are not standard compliant";
}

std::string equivalence_detail(const Pair& pair) {
  Verdict ax = check_axiomatic(pair.client, pair.server);
  Verdict gfp = check_gfp_oracle(pair.client, pair.server);
  if (ax.compliant == gfp.compliant) return "";
  std::string detail = std::string("axiomatic=") + (ax.compliant ? "compliant" : "non-compliant") +
                       " oracle=" + (gfp.compliant ? "compliant" : "non-compliant");
  if (const ViolationPath* p = ax.violation()) detail += "; axiomatic refused at " + render(p->end());
  if (const ViolationPath* p = gfp.violation()) detail += "; oracle path ends at " + render(p->end());
  return detail;
}

std::string evidence_detail(const Pair& pair) {
  Verdict ax = check_axiomatic(pair.client, pair.server);
  if (const Derivation* d = ax.derivation()) {
    VerifyResult r = verify_derivation(**d);
    if (!r.ok) return "derivation rejected at " + r.node + ": " + r.reason;
  } else if (const ViolationPath* p = ax.violation()) {
    if (!replay_violation(*p)) return "axiomatic violation path does not replay";
  } else {
    return "axiomatic verdict without evidence";
  }
  Verdict gfp = check_gfp_oracle(pair.client, pair.server);
  if (!gfp.compliant) {
    const ViolationPath* p = gfp.violation();
    if (p == nullptr || !replay_violation(*p)) return "oracle violation path does not replay";
  }
  return "";
}

std::string duality_detail(const Pair& pair) {
  return check_axiomatic(pair.client, pair.server).compliant ? "" : "not compliant with its dual";
}

void run_pinned(PropertyReport& report, const std::function<std::string(const Pair&)>& fails) {
  for (const auto& f : kPinnedPairs) {
    Pair pair{parse(f.client), parse(f.server)};
    std::string detail = fails(pair);
    ++report.pinned;
    ++report.trials;
    if (detail == "skip") {
      ++report.skipped;
    } else if (!detail.empty()) {
      report.failures.push_back(make_failure(0, pair, "pinned: " + detail));
    }
  }
}

PropertyReport run_pairs(std::string name, std::size_t n, const GenParams& p,
                         const std::function<std::string(const Pair&)>& fails) {
  p.validate();
  Timer timer;
  PropertyReport report;
  report.property = std::move(name);
  run_pinned(report, fails);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t seed = trial_seed(p.seed, i);
    Pair pair = gen_pair(p, seed, i % 2 == 0);
    ++report.trials;
    std::string detail = fails(pair);
    if (detail == "skip") {
      ++report.skipped;
    } else if (!detail.empty()) {
      record(report, seed, pair, [&](const Pair& q) {
        std::string d = fails(q);
        return d == "skip" ? std::string() : d;
      });
    }
  }
  report.elapsed = timer.elapsed();
  return report;
}

PropertyReport run_all_pairs(std::string name, const std::vector<WellFormedBehaviour>& terms,
                             const std::function<std::string(const Pair&)>& fails) {
  Timer timer;
  PropertyReport report;
  report.property = std::move(name);
  for (const auto& client : terms) {
    for (const auto& server : terms) {
      Pair pair{client, server};
      ++report.trials;
      std::string detail = fails(pair);
      if (detail == "skip") {
        ++report.skipped;
      } else if (!detail.empty()) {
        report.failures.push_back(make_failure(0, pair, detail));
      }
    }
  }
  report.elapsed = timer.elapsed();
  return report;
}

}  // namespace

void GenParams::validate() const {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
  if (max_branches < 1) throw std::invalid_argument("max_branches must be at least 1");
  if (alphabet.empty()) throw std::invalid_argument("alphabet must be nonempty");
  for (const auto& a : alphabet) {
    if (!is_valid_name(a)) throw std::invalid_argument("invalid name in alphabet: '" + a + "'");
  }
  auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!prob(p_checkpoint) || !prob(p_rec)) throw std::invalid_argument("probabilities must lie in [0, 1]");
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

WellFormedBehaviour gen_behaviour(const GenParams& p) {
  Rng rng(p.seed);
  return gen_behaviour(p, rng);
}

WellFormedBehaviour gen_behaviour(const GenParams& p, Rng& rng) {
  p.validate();
  return WellFormedBehaviour::validate(Generator(p, rng).top());
}

WellFormedBehaviour mutate(const WellFormedBehaviour& b, const GenParams& p, Rng& rng) {
  std::vector<Behaviour> choices;
  collect_choices(b.term(), choices);
  if (choices.empty()) return b;
  std::size_t target = std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng);
  const Behaviour& node = choices[target];
  int kind = std::uniform_int_distribution<int>(0, 3)(rng);
  switch (kind) {
    case 0:
      return edited(b, target, [](const Behaviour& c) { return c.with_checkpoint(!c.checkpointed()); });
    case 1:
      if (node.branches().size() > 1) {
        std::size_t j = std::uniform_int_distribution<std::size_t>(0, node.branches().size() - 1)(rng);
        return edited(b, target, [j](const Behaviour& c) { return drop_branch(c, j); });
      }
      [[fallthrough]];
    case 2: {
      std::vector<std::string> unused;
      for (const auto& a : p.alphabet) {
        if (node.find(a) == nullptr) unused.push_back(a);
      }
      if (!unused.empty()) {
        std::string fresh = unused[std::uniform_int_distribution<std::size_t>(0, unused.size() - 1)(rng)];
        std::size_t j = std::uniform_int_distribution<std::size_t>(0, node.branches().size() - 1)(rng);
        return edited(b, target, [&](const Behaviour& c) {
          std::vector<Branch> branches(c.branches().begin(), c.branches().end());
          branches[j].label = fresh;
          return Behaviour::choice(c.kind(), std::move(branches), c.checkpointed());
        });
      }
      [[fallthrough]];
    }
    default:
      return edited(b, target, [](const Behaviour&) { return Behaviour::success(); });
  }
}

Pair gen_pair(const GenParams& p, std::uint64_t seed, bool boundary_biased) {
  Rng rng(seed);
  WellFormedBehaviour rho = gen_behaviour(p, rng);
  if (!boundary_biased) return {rho, gen_behaviour(p, rng)};
  std::size_t edits = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
  if (std::bernoulli_distribution(0.5)(rng)) {
    WellFormedBehaviour server = dual(rho);
    for (std::size_t k = 0; k < edits; ++k) server = mutate(server, p, rng);
    return {rho, server};
  }
  WellFormedBehaviour client = rho;
  for (std::size_t k = 0; k < edits; ++k) client = mutate(client, p, rng);
  return {client, dual(rho)};
}

std::string to_text(const PropertyReport& r) {
  std::ostringstream os;
  os << r.property << ": " << (r.passed() ? "PASS" : "FAIL") << " trials=" << r.trials << " skipped=" << r.skipped
     << " failures=" << r.failures.size() << " (" << r.elapsed.count() << " ms)\n";
  for (const auto& f : r.failures) {
    os << "  seed=" << f.seed << " client=" << f.client << " server=" << f.server << ": " << f.detail << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const PropertyReport& r) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : r.failures) {
    failures.push_back({{"seed", f.seed}, {"client", f.client}, {"server", f.server}, {"detail", f.detail}});
  }
  return {{"property", r.property}, {"trials", r.trials},           {"skipped", r.skipped},
          {"pinned", r.pinned},     {"failures", failures},         {"elapsed_ms", r.elapsed.count()},
          {"passed", r.passed()}};
}

PropertyReport prop_duality(std::size_t n, const GenParams& p) {
  p.validate();
  Timer timer;
  PropertyReport report;
  report.property = "duality";
  for (const char* fixed : {kHoliday, kHolidayServer}) {
    WellFormedBehaviour rho = parse(fixed);
    Pair pair{rho, dual(rho)};
    ++report.pinned;
    ++report.trials;
    if (std::string d = duality_detail(pair); !d.empty()) report.failures.push_back(make_failure(0, pair, "pinned: " + d));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t seed = trial_seed(p.seed, i);
    Rng rng(seed);
    WellFormedBehaviour rho = gen_behaviour(p, rng);
    ++report.trials;
    Pair pair{rho, dual(rho)};
    if (duality_detail(pair).empty()) continue;
    // Shrink the client and keep the server its dual.
    Pair small = shrink_pair(pair, [](const Pair& q) {
      return q.server == dual(q.client) && !duality_detail(q).empty();
    });
    report.failures.push_back(make_failure(seed, small, "not compliant with its dual"));
  }
  report.elapsed = timer.elapsed();
  return report;
}

PropertyReport prop_conservativity(std::size_t n, const GenParams& p) {
  return run_pairs("conservativity", n, p, conservativity_detail);
}

PropertyReport prop_checker_equivalence(std::size_t n, const GenParams& p) {
  return run_pairs("checker_equivalence", n, p, equivalence_detail);
}

PropertyReport prop_evidence(std::size_t n, const GenParams& p) { return run_pairs("evidence", n, p, evidence_detail); }

namespace {

class Enumerator {
public:
  Enumerator(std::size_t max_depth, const std::vector<std::string>& alphabet, bool recursion)
      : alphabet_(alphabet), recursion_(recursion) {
    std::vector<std::string> sorted = alphabet;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    alphabet_ = sorted;
    for (std::size_t mask = 1; mask < (std::size_t{1} << alphabet_.size()); ++mask) {
      std::vector<std::string> subset;
      for (std::size_t k = 0; k < alphabet_.size(); ++k) {
        if (mask & (std::size_t{1} << k)) subset.push_back(alphabet_[k]);
      }
      subsets_.push_back(std::move(subset));
    }
    max_depth_ = max_depth;
  }

  std::vector<Behaviour> run() { return terms(max_depth_, 0, true); }

private:
  // Terms of choice depth <= depth with `binders` variables in scope.
  std::vector<Behaviour> terms(std::size_t depth, std::size_t binders, bool top) {
    std::vector<Behaviour> out{Behaviour::success()};
    if (!top) {
      for (std::uint32_t i = 0; i < binders; ++i) out.push_back(Behaviour::var(i));
    }
    if (depth == 0) return out;
    auto plain = choices(depth, binders);
    out.insert(out.end(), plain.begin(), plain.end());
    if (recursion_) {
      for (auto& c : choices(depth, binders + 1)) out.push_back(Behaviour::rec(binder_name(binders), std::move(c)));
    }
    return out;
  }

  std::vector<Behaviour> choices(std::size_t depth, std::size_t binders) {
    std::vector<Behaviour> conts = terms(depth - 1, binders, false);
    std::vector<Behaviour> out;
    for (const auto& subset : subsets_) {
      std::vector<std::vector<Branch>> partial{{}};
      for (const auto& label : subset) {
        std::vector<std::vector<Branch>> grown;
        for (const auto& prefix : partial) {
          for (const auto& c : conts) {
            auto next = prefix;
            next.push_back({label, c});
            grown.push_back(std::move(next));
          }
        }
        partial = std::move(grown);
      }
      for (const auto& branches : partial) {
        for (Kind kind : {Kind::External, Kind::Internal}) {
          for (bool ck : {false, true}) out.push_back(Behaviour::choice(kind, branches, ck));
        }
      }
    }
    return out;
  }

  std::vector<std::string> alphabet_;
  std::vector<std::vector<std::string>> subsets_;
  bool recursion_;
  std::size_t max_depth_ = 0;
};

}  // namespace

std::vector<WellFormedBehaviour> enumerate_behaviours(std::size_t max_depth, const std::vector<std::string>& alphabet,
                                                      bool recursion) {
  std::vector<WellFormedBehaviour> out;
  for (auto& b : Enumerator(max_depth, alphabet, recursion).run()) out.push_back(WellFormedBehaviour::validate(b));
  return out;
}

PropertyReport exhaustive_duality(const std::vector<WellFormedBehaviour>& terms) {
  Timer timer;
  PropertyReport report;
  report.property = "exhaustive_duality";
  for (const auto& rho : terms) {
    Pair pair{rho, dual(rho)};
    ++report.trials;
    if (std::string d = duality_detail(pair); !d.empty()) report.failures.push_back(make_failure(0, pair, d));
  }
  report.elapsed = timer.elapsed();
  return report;
}

PropertyReport exhaustive_checker_equivalence(const std::vector<WellFormedBehaviour>& terms) {
  return run_all_pairs("exhaustive_checker_equivalence", terms, equivalence_detail);
}

PropertyReport exhaustive_conservativity(const std::vector<WellFormedBehaviour>& terms) {
  return run_all_pairs("exhaustive_conservativity", terms, conservativity_detail);
}

std::vector<WellFormedBehaviour> shrink_candidates(const WellFormedBehaviour& b) {
  std::vector<Behaviour> choices;
  collect_choices(b.term(), choices);
  std::vector<WellFormedBehaviour> out;
  for (std::size_t k = 0; k < choices.size(); ++k) {
    for (std::size_t j = 0; choices[k].branches().size() > 1 && j < choices[k].branches().size(); ++j) {
      out.push_back(edited(b, k, [j](const Behaviour& c) { return drop_branch(c, j); }));
    }
  }
  for (std::size_t k = 0; k < choices.size(); ++k) {
    out.push_back(edited(b, k, [](const Behaviour&) { return Behaviour::success(); }));
  }
  return out;
}

Pair shrink_pair(Pair pair, const std::function<bool(const Pair&)>& still_fails) {
  for (bool progress = true; progress;) {
    progress = false;
    for (auto& c : shrink_candidates(pair.client)) {
      Pair next{c, pair.server};
      if (still_fails(next)) {
        pair = std::move(next);
        progress = true;
        break;
      }
    }
    if (progress) continue;
    for (auto& s : shrink_candidates(pair.server)) {
      Pair next{pair.client, s};
      if (still_fails(next)) {
        pair = std::move(next);
        progress = true;
        break;
      }
    }
  }
  return pair;
}

namespace {

// `crossed[i]` is true when binder i (outermost first) lies above a
// checkpointed choice on the current path.
void scan(const Behaviour& b, std::vector<bool>& crossed, Coverage& cov) {
  switch (b.kind()) {
    case Kind::Success:
      return;
    case Kind::Var:
      if (b.index() < crossed.size() && crossed[crossed.size() - 1 - b.index()]) cov.recursion_through_checkpoint = true;
      return;
    case Kind::Rec:
      crossed.push_back(false);
      scan(b.body(), crossed, cov);
      crossed.pop_back();
      return;
    case Kind::External:
    case Kind::Internal: {
      std::vector<bool> saved = crossed;
      if (b.checkpointed()) {
        (b.kind() == Kind::External ? cov.checkpointed_external : cov.checkpointed_internal) = true;
        std::fill(crossed.begin(), crossed.end(), true);
      }
      for (const auto& br : b.branches()) scan(br.next, crossed, cov);
      crossed = std::move(saved);
      return;
    }
  }
}

}  // namespace

Coverage coverage_of(const Behaviour& b) {
  Coverage cov;
  std::vector<bool> crossed;
  scan(b, crossed, cov);
  return cov;
}

}  // namespace sbck::testkit

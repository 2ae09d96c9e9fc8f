#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbck/compliance.hpp"
#include "sbck/syntax.hpp"

namespace sbck::testkit {

struct GenParams {
  std::size_t max_depth = 5;
  std::size_t max_branches = 3;
  std::vector<std::string> alphabet{"a", "b", "c", "d"};
  double p_checkpoint = 0.3;
  double p_rec = 0.15;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

using Rng = std::mt19937_64;

/// Seed of trial `i` under base seed `seed` (splitmix64).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t i);

/// Random closed behaviour; guarded by construction because `rec` only
/// wraps a choice and variables only occur behind a prefix.
WellFormedBehaviour gen_behaviour(const GenParams& p);
WellFormedBehaviour gen_behaviour(const GenParams& p, Rng& rng);

/// One small edit: flip a checkpoint, drop or relabel a branch, or cut a
/// choice down to `1`. Returns the input unchanged if no edit applies.
WellFormedBehaviour mutate(const WellFormedBehaviour& b, const GenParams& p, Rng& rng);

struct Pair {
  WellFormedBehaviour client;
  WellFormedBehaviour server;
};

/// Boundary-biased pairs are a behaviour against a mutated dual (or a
/// mutated behaviour against its dual); unbiased pairs are independent.
Pair gen_pair(const GenParams& p, std::uint64_t seed, bool boundary_biased);

struct Failure {
  std::uint64_t seed = 0;
  std::string client;
  std::string server;
  std::string detail;
};

struct PropertyReport {
  std::string property;
  std::size_t trials = 0;
  /// Trials whose antecedent did not hold (implication properties).
  std::size_t skipped = 0;
  /// Fixed fixtures evaluated on top of the random trials.
  std::size_t pinned = 0;
  std::vector<Failure> failures;
  std::chrono::milliseconds elapsed{0};

  bool passed() const { return failures.empty(); }
};

std::string to_text(const PropertyReport& r);
nlohmann::json to_json(const PropertyReport& r);

/// check_axiomatic(rho, dual(rho)) holds.
PropertyReport prop_duality(std::size_t n, const GenParams& p);
/// check_axiomatic(rho, sigma) implies check_standard(erase rho, erase sigma).
PropertyReport prop_conservativity(std::size_t n, const GenParams& p);
/// check_axiomatic and check_gfp_oracle agree.
PropertyReport prop_checker_equivalence(std::size_t n, const GenParams& p);
/// Derivations verify and violation paths replay, for both deciders.
PropertyReport prop_evidence(std::size_t n, const GenParams& p);

/// Every well-formed behaviour with choice depth <= max_depth over
/// `alphabet`, up to branch order. With `recursion`, each choice may also
/// be wrapped in one `rec` and continuations may be variables.
std::vector<WellFormedBehaviour> enumerate_behaviours(std::size_t max_depth, const std::vector<std::string>& alphabet,
                                                      bool recursion);

PropertyReport exhaustive_duality(const std::vector<WellFormedBehaviour>& terms);
PropertyReport exhaustive_checker_equivalence(const std::vector<WellFormedBehaviour>& terms);
PropertyReport exhaustive_conservativity(const std::vector<WellFormedBehaviour>& terms);

/// Terms one step smaller: one branch dropped, or one choice replaced by 1.
std::vector<WellFormedBehaviour> shrink_candidates(const WellFormedBehaviour& b);

/// Greedily shrinks a pair while `still_fails` holds. The result is locally
/// minimal: no candidate of either side still fails.
Pair shrink_pair(Pair pair, const std::function<bool(const Pair&)>& still_fails);

struct Coverage {
  bool checkpointed_external = false;
  bool checkpointed_internal = false;
  /// Some variable's path from its binder crosses a checkpointed choice.
  bool recursion_through_checkpoint = false;
};

Coverage coverage_of(const Behaviour& b);

}  // namespace sbck::testkit

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sbck/syntax.hpp"

namespace sbck {

/// Rollback target of one endpoint: nothing (printed `o`), or the last
/// checkpointed choice it traversed.
class Past {
public:
  Past() = default;
  static Past none() { return Past(); }
  /// Throws std::invalid_argument unless `b` is a checkpointed choice.
  static Past checkpoint(WellFormedBehaviour b);

  bool empty() const { return !target_.has_value(); }
  bool has_value() const { return target_.has_value(); }
  const WellFormedBehaviour& behaviour() const { return target_.value(); }
  std::size_t hash() const { return target_ ? target_->term().hash() : 0x2545f491u; }

  friend bool operator==(const Past& a, const Past& b) { return a.target_ == b.target_; }

private:
  std::optional<WellFormedBehaviour> target_;
};

/// `past < current`. The current behaviour is always head-normal: it is
/// unfolded on construction, so a config never holds a top-level `rec`.
class Config {
public:
  Config() = default;
  Config(Past past, WellFormedBehaviour current);

  const Past& past() const { return past_; }
  const WellFormedBehaviour& current() const { return current_; }
  std::size_t hash() const;

  friend bool operator==(const Config& a, const Config& b) {
    return a.past_ == b.past_ && a.current_ == b.current_;
  }

private:
  Past past_;
  WellFormedBehaviour current_;
};

struct Label {
  enum class Kind { Input, Output, Tau, Rbk };
  Kind kind = Kind::Tau;
  /// Channel name for Input/Output; the synchronised name for Tau.
  std::string name;

  static Label input(std::string n) { return {Kind::Input, std::move(n)}; }
  static Label output(std::string n) { return {Kind::Output, std::move(n)}; }
  static Label tau(std::string n = {}) { return {Kind::Tau, std::move(n)}; }
  static Label rbk() { return {Kind::Rbk, {}}; }

  bool is_tau() const { return kind == Kind::Tau; }
  bool is_rbk() const { return kind == Kind::Rbk; }

  friend bool operator==(const Label&, const Label&) = default;
};

/// Equality that ignores the name a Tau label carries.
bool same_action(const Label& a, const Label& b);

std::string to_string(const Label& l);

/// `client || server`.
struct SystemState {
  Config client;
  Config server;

  std::size_t hash() const;
  friend bool operator==(const SystemState&, const SystemState&) = default;
};

struct ConfigHash {
  std::size_t operator()(const Config& c) const noexcept { return c.hash(); }
};
struct SystemStateHash {
  std::size_t operator()(const SystemState& s) const noexcept { return s.hash(); }
};

SystemState initial_state(const WellFormedBehaviour& client, const WellFormedBehaviour& server);

/// Labels of an external choice (checkpoint-transparent); empty otherwise.
std::set<std::string> sum_acts(const Behaviour& b);
/// Labels of an internal choice (checkpoint-transparent); empty otherwise.
std::set<std::string> oplus_acts(const Behaviour& b);

/// The past after acting from `b`: `b` itself if it is checkpointed,
/// `past` otherwise.
Past checkpoint_update(const Past& past, const WellFormedBehaviour& b);

struct ConfigStep {
  Label label;
  Config target;
};

/// All single-endpoint steps, forward ones in label order, rollback last.
std::vector<ConfigStep> config_steps(const Config& c);

struct PairStep {
  Label label;  // Tau or Rbk
  SystemState target;
};

/// Client/server steps: synchronisations guarded by the output-inclusion
/// side condition, then the joint rollback when both sides can roll back.
std::vector<PairStep> pair_steps(const SystemState& s);

bool has_tau_step(const SystemState& s);

// Simulation.

struct Directive {
  enum class Kind { Tau, TauAny, Rbk };
  Kind kind = Kind::TauAny;
  std::string name;

  /// `tau:<name>`, `tau:any` or `rbk`; throws std::invalid_argument.
  static Directive parse(std::string_view text);
  std::string str() const;
};

/// Splits a comma or whitespace separated script.
std::vector<Directive> parse_script(std::string_view text);

struct TraceEntry {
  std::optional<Label> label;  // empty for the initial state
  SystemState state;
};

struct Trace {
  std::vector<TraceEntry> entries;
  /// Set when a directive was not applicable; entries stop before it.
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

Trace run_trace(const SystemState& start, const std::vector<Directive>& script);

std::string render(const Past& p);
std::string render(const Config& c);
std::string render(const SystemState& s);
std::string render(const Trace& t);

}  // namespace sbck

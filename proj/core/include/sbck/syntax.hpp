#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sbck {

/// Session behaviours with checkpoints.
///
/// A behaviour is an immutable, structurally shared syntax tree. Variables
/// are de Bruijn indices (0 = innermost enclosing `rec`), so equality is
/// insensitive to the names chosen for binders; the binder name survives
/// only as a hint for printing. Choices compare as label-keyed maps, so
/// branch order is kept for printing but never affects equality or hashing.

enum class Kind : std::uint8_t { Success, External, Internal, Var, Rec };

struct Branch;

class Behaviour {
public:
  /// The success term `1`.
  Behaviour();

  static Behaviour success();
  static Behaviour external(std::vector<Branch> branches, bool checkpointed = false);
  static Behaviour internal(std::vector<Branch> branches, bool checkpointed = false);
  static Behaviour choice(Kind kind, std::vector<Branch> branches, bool checkpointed);
  static Behaviour var(std::uint32_t index);
  static Behaviour rec(std::string hint, Behaviour body);

  Kind kind() const;
  bool is_choice() const { return kind() == Kind::External || kind() == Kind::Internal; }
  bool is_success() const { return kind() == Kind::Success; }
  bool checkpointed() const;

  std::span<const Branch> branches() const;
  /// Continuation of the branch labelled `label`, or nullptr.
  const Behaviour* find(std::string_view label) const;

  std::uint32_t index() const;
  const std::string& hint() const;
  Behaviour body() const;

  /// Number of binders a context must supply to close this term
  /// (0 for closed terms).
  std::uint32_t free_depth() const;
  bool closed() const { return free_depth() == 0; }

  /// Number of syntax nodes.
  std::size_t size() const;
  std::size_t hash() const;

  /// Same as a copy that set a different checkpoint flag on a choice.
  Behaviour with_checkpoint(bool checkpointed) const;

  /// Stricter than ==: branch order must also agree. Binder hints are
  /// still ignored.
  bool identical(const Behaviour& other) const;

  friend bool operator==(const Behaviour& a, const Behaviour& b);

private:
  struct Node;
  explicit Behaviour(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Branch {
  std::string label;
  Behaviour next;
};

struct BehaviourHash {
  std::size_t operator()(const Behaviour& b) const noexcept { return b.hash(); }
};

/// Category of a rejected term. Every rejection carries exactly one.
enum class ErrorKind : std::uint8_t {
  Lexical,
  Syntax,
  MixedChoice,
  DuplicateLabel,
  UnguardedRecursion,
  FreeVariable,
  CheckpointOnNonChoice,
};

std::string_view to_string(ErrorKind kind);

/// Raised by the parser and by well-formedness validation. Line and column
/// are 1-based; both are 0 for terms that did not come from text.
class SyntaxError : public std::runtime_error {
public:
  SyntaxError(ErrorKind kind, std::string message, std::size_t line = 0, std::size_t column = 0);

  ErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

private:
  ErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

/// Raised when an exploration outgrows its configured state budget.
class StateCapExceeded : public std::runtime_error {
public:
  explicit StateCapExceeded(std::size_t cap);
  std::size_t cap() const { return cap_; }

private:
  std::size_t cap_;
};

/// Throws SyntaxError unless `b` is closed, guarded, has nonempty choices
/// with pairwise distinct valid labels, and no `rec` whose body is a variable.
void check_well_formed(const Behaviour& b);

bool is_valid_name(std::string_view name);

/// A behaviour that passed check_well_formed. Operations that preserve
/// well-formedness (dual, erase, unfold, branch descent) return this type
/// directly without re-validation.
class WellFormedBehaviour {
public:
  WellFormedBehaviour() = default;  // `1`
  static WellFormedBehaviour validate(Behaviour b);

  const Behaviour& term() const { return term_; }
  operator const Behaviour&() const { return term_; }
  const Behaviour* operator->() const { return &term_; }

  friend bool operator==(const WellFormedBehaviour& a, const WellFormedBehaviour& b) {
    return a.term_ == b.term_;
  }

private:
  explicit WellFormedBehaviour(Behaviour b) : term_(std::move(b)) {}
  friend struct Trusted;
  Behaviour term_;
};

struct WellFormedHash {
  std::size_t operator()(const WellFormedBehaviour& b) const noexcept { return b.term().hash(); }
};

/// Swaps inputs/outputs and external/internal choices; keeps checkpoints.
Behaviour dual(const Behaviour& b);
WellFormedBehaviour dual(const WellFormedBehaviour& b);

/// Clears every checkpoint flag.
Behaviour erase(const Behaviour& b);
WellFormedBehaviour erase(const WellFormedBehaviour& b);

bool has_checkpoint(const Behaviour& b);

/// Replaces the variable bound by the innermost binder around `b` (index
/// `depth` inside `b`) by the closed term `replacement`.
Behaviour substitute(const Behaviour& b, std::uint32_t depth, const Behaviour& replacement);

/// One equi-recursive step: `rec x. s` becomes `s[rec x. s / x]`.
Behaviour unfold_once(const Behaviour& b);

/// Unfolds until the head is not `rec`.
Behaviour unfold(const Behaviour& b);
WellFormedBehaviour unfold(const WellFormedBehaviour& b);

/// Continuation of a branch of a closed choice; the result is closed.
WellFormedBehaviour branch_target(const WellFormedBehaviour& choice, std::string_view label);

/// Choice nesting depth: `1` and variables have depth 0.
std::size_t depth(const Behaviour& b);

/// Finite set of closed behaviours reachable from a root by one-step
/// unfolding and descent into branches.
struct StateClosure {
  std::vector<WellFormedBehaviour> states;

  std::size_t size() const { return states.size(); }
  bool contains(const Behaviour& b) const;
  /// States that begin with a checkpointed choice.
  std::size_t checkpointed_count() const;
  /// States whose head is not `rec`.
  std::size_t head_count() const;
};

inline constexpr std::size_t kDefaultClosureCap = 1'000'000;

StateClosure state_closure(const WellFormedBehaviour& root, std::size_t cap = kDefaultClosureCap);

// Text form.

/// Parses one behaviour; `#` starts a comment running to end of line.
WellFormedBehaviour parse(std::string_view text);

/// Prints with minimal parentheses. parse(render(b)) is identical to b up
/// to binder hints, which are renamed only to avoid capture.
std::string render(const Behaviour& b);

}  // namespace sbck

template <>
struct std::hash<sbck::Behaviour> {
  std::size_t operator()(const sbck::Behaviour& b) const noexcept { return b.hash(); }
};

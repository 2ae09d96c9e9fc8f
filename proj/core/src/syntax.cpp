#include "sbck/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <unordered_set>

#include "trusted.hpp"

namespace sbck {

struct Behaviour::Node {
  Kind kind = Kind::Success;
  bool checkpointed = false;
  std::vector<Branch> branches;
  std::uint32_t index = 0;
  std::string hint;
  std::shared_ptr<const Node> body;
  std::uint32_t free_depth = 0;
  std::size_t size = 1;
  std::size_t hash = 0;
};

namespace {

constexpr std::size_t kGolden = 0x9e3779b97f4a7c15ULL;

std::size_t mix(std::size_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb93fe53a87ebULL;
  h ^= h >> 33;
  return h;
}

std::size_t combine(std::size_t seed, std::size_t v) {
  return seed ^ (mix(v) + kGolden + (seed << 6) + (seed >> 2));
}

}  // namespace

Behaviour::Behaviour() : Behaviour(success()) {}

Behaviour Behaviour::success() {
  static const std::shared_ptr<const Node> one = [] {
    auto n = std::make_shared<Node>();
    n->hash = mix(0x51);
    return n;
  }();
  return Behaviour(one);
}

Behaviour Behaviour::external(std::vector<Branch> branches, bool checkpointed) {
  return choice(Kind::External, std::move(branches), checkpointed);
}

Behaviour Behaviour::internal(std::vector<Branch> branches, bool checkpointed) {
  return choice(Kind::Internal, std::move(branches), checkpointed);
}

Behaviour Behaviour::choice(Kind kind, std::vector<Branch> branches, bool checkpointed) {
  if (kind != Kind::External && kind != Kind::Internal) {
    throw std::invalid_argument("Behaviour::choice: kind must be External or Internal");
  }
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->checkpointed = checkpointed;
  // Branch hashes are summed so that the hash does not depend on order.
  std::size_t branch_sum = 0;
  for (const auto& br : branches) {
    n->free_depth = std::max(n->free_depth, br.next.free_depth());
    n->size += br.next.size();
    branch_sum += combine(std::hash<std::string>{}(br.label), br.next.hash());
  }
  n->branches = std::move(branches);
  n->hash = combine(combine(mix(static_cast<std::size_t>(kind) * 2 + (checkpointed ? 1 : 0)), branch_sum),
                    n->branches.size());
  return Behaviour(std::move(n));
}

Behaviour Behaviour::var(std::uint32_t index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->index = index;
  n->free_depth = index + 1;
  n->hash = combine(mix(0x7a), index);
  return Behaviour(std::move(n));
}

Behaviour Behaviour::rec(std::string hint, Behaviour body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Rec;
  n->hint = std::move(hint);
  n->free_depth = body.free_depth() == 0 ? 0 : body.free_depth() - 1;
  n->size = 1 + body.size();
  n->hash = combine(mix(0x3c), body.hash());
  n->body = std::move(body.node_);
  return Behaviour(std::move(n));
}

Kind Behaviour::kind() const { return node_->kind; }
bool Behaviour::checkpointed() const { return node_->checkpointed; }
std::span<const Branch> Behaviour::branches() const { return node_->branches; }
std::uint32_t Behaviour::index() const { return node_->index; }
const std::string& Behaviour::hint() const { return node_->hint; }

Behaviour Behaviour::body() const {
  if (node_->kind != Kind::Rec) throw std::logic_error("Behaviour::body on a non-rec term");
  return Behaviour(node_->body);
}

std::uint32_t Behaviour::free_depth() const { return node_->free_depth; }
std::size_t Behaviour::size() const { return node_->size; }
std::size_t Behaviour::hash() const { return node_->hash; }

const Behaviour* Behaviour::find(std::string_view label) const {
  for (const auto& br : node_->branches) {
    if (br.label == label) return &br.next;
  }
  return nullptr;
}

Behaviour Behaviour::with_checkpoint(bool checkpointed) const {
  if (!is_choice()) throw std::logic_error("with_checkpoint on a non-choice");
  if (checkpointed == node_->checkpointed) return *this;
  return choice(node_->kind, node_->branches, checkpointed);
}

bool operator==(const Behaviour& a, const Behaviour& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind) return false;
  switch (a.node_->kind) {
    case Kind::Success:
      return true;
    case Kind::Var:
      return a.node_->index == b.node_->index;
    case Kind::Rec:
      return Behaviour(a.node_->body) == Behaviour(b.node_->body);
    case Kind::External:
    case Kind::Internal: {
      if (a.node_->checkpointed != b.node_->checkpointed) return false;
      if (a.node_->branches.size() != b.node_->branches.size()) return false;
      for (const auto& br : a.node_->branches) {
        const Behaviour* other = b.find(br.label);
        if (other == nullptr || !(br.next == *other)) return false;
      }
      return true;
    }
  }
  return false;
}

bool Behaviour::identical(const Behaviour& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::Success:
      return true;
    case Kind::Var:
      return index() == other.index();
    case Kind::Rec:
      return body().identical(other.body());
    case Kind::External:
    case Kind::Internal: {
      if (checkpointed() != other.checkpointed()) return false;
      auto mine = branches();
      auto theirs = other.branches();
      if (mine.size() != theirs.size()) return false;
      for (std::size_t i = 0; i < mine.size(); ++i) {
        if (mine[i].label != theirs[i].label || !mine[i].next.identical(theirs[i].next)) return false;
      }
      return true;
    }
  }
  return false;
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Lexical: return "lexical error";
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::MixedChoice: return "mixed choice";
    case ErrorKind::DuplicateLabel: return "duplicate branch label";
    case ErrorKind::UnguardedRecursion: return "unguarded recursion";
    case ErrorKind::FreeVariable: return "free variable";
    case ErrorKind::CheckpointOnNonChoice: return "checkpoint on a non-choice";
  }
  return "error";
}

namespace {

std::string format_error(ErrorKind kind, const std::string& message, std::size_t line, std::size_t column) {
  std::string out;
  if (line != 0) out += std::to_string(line) + ":" + std::to_string(column) + ": ";
  out += std::string(to_string(kind)) + ": " + message;
  return out;
}

}  // namespace

SyntaxError::SyntaxError(ErrorKind kind, std::string message, std::size_t line, std::size_t column)
    : std::runtime_error(format_error(kind, message, line, column)),
      kind_(kind),
      line_(line),
      column_(column),
      detail_(std::move(message)) {}

StateCapExceeded::StateCapExceeded(std::size_t cap)
    : std::runtime_error("state cap of " + std::to_string(cap) + " exceeded"), cap_(cap) {}

bool is_valid_name(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
  if (name == "rec") return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

namespace {

// `depth` binders enclose `b`; those at positions >= `guard_from` have not
// yet been separated from `b` by an action prefix.
void check_node(const Behaviour& b, std::uint32_t depth, std::uint32_t guard_from) {
  switch (b.kind()) {
    case Kind::Success:
      return;
    case Kind::Var: {
      if (b.index() >= depth) {
        throw SyntaxError(ErrorKind::FreeVariable, "variable index " + std::to_string(b.index()) + " is not bound");
      }
      std::uint32_t binder = depth - 1 - b.index();
      if (binder >= guard_from) {
        throw SyntaxError(ErrorKind::UnguardedRecursion, "variable occurs without an action prefix below its binder");
      }
      return;
    }
    case Kind::Rec: {
      Behaviour body = b.body();
      if (body.kind() == Kind::Var) {
        throw SyntaxError(ErrorKind::UnguardedRecursion, "the body of rec is a variable");
      }
      check_node(body, depth + 1, guard_from);
      return;
    }
    case Kind::External:
    case Kind::Internal: {
      auto branches = b.branches();
      if (branches.empty()) throw SyntaxError(ErrorKind::Syntax, "choice with no branches");
      std::unordered_set<std::string_view> seen;
      for (const auto& br : branches) {
        if (!is_valid_name(br.label)) {
          throw SyntaxError(ErrorKind::Lexical, "invalid name '" + br.label + "'");
        }
        if (!seen.insert(br.label).second) {
          throw SyntaxError(ErrorKind::DuplicateLabel, "label '" + br.label + "' occurs twice in one choice");
        }
      }
      for (const auto& br : branches) check_node(br.next, depth, depth);
      return;
    }
  }
}

}  // namespace

void check_well_formed(const Behaviour& b) { check_node(b, 0, 0); }

WellFormedBehaviour WellFormedBehaviour::validate(Behaviour b) {
  check_well_formed(b);
  return WellFormedBehaviour(std::move(b));
}

namespace {

template <typename ChoiceFn>
Behaviour map_choices(const Behaviour& b, const ChoiceFn& fn) {
  switch (b.kind()) {
    case Kind::Success:
    case Kind::Var:
      return b;
    case Kind::Rec:
      return Behaviour::rec(b.hint(), map_choices(b.body(), fn));
    case Kind::External:
    case Kind::Internal: {
      std::vector<Branch> branches;
      branches.reserve(b.branches().size());
      for (const auto& br : b.branches()) branches.push_back({br.label, map_choices(br.next, fn)});
      return fn(b, std::move(branches));
    }
  }
  return b;
}

}  // namespace

Behaviour dual(const Behaviour& b) {
  return map_choices(b, [](const Behaviour& c, std::vector<Branch> branches) {
    Kind flipped = c.kind() == Kind::External ? Kind::Internal : Kind::External;
    return Behaviour::choice(flipped, std::move(branches), c.checkpointed());
  });
}

WellFormedBehaviour dual(const WellFormedBehaviour& b) { return Trusted::wrap(dual(b.term())); }

Behaviour erase(const Behaviour& b) {
  if (!has_checkpoint(b)) return b;
  return map_choices(b, [](const Behaviour& c, std::vector<Branch> branches) {
    return Behaviour::choice(c.kind(), std::move(branches), false);
  });
}

WellFormedBehaviour erase(const WellFormedBehaviour& b) { return Trusted::wrap(erase(b.term())); }

bool has_checkpoint(const Behaviour& b) {
  switch (b.kind()) {
    case Kind::Success:
    case Kind::Var:
      return false;
    case Kind::Rec:
      return has_checkpoint(b.body());
    case Kind::External:
    case Kind::Internal:
      if (b.checkpointed()) return true;
      return std::any_of(b.branches().begin(), b.branches().end(),
                         [](const Branch& br) { return has_checkpoint(br.next); });
  }
  return false;
}

Behaviour substitute(const Behaviour& b, std::uint32_t depth, const Behaviour& replacement) {
  if (b.free_depth() <= depth) return b;
  switch (b.kind()) {
    case Kind::Success:
      return b;
    case Kind::Var:
      if (b.index() == depth) return replacement;
      return Behaviour::var(b.index() - 1);
    case Kind::Rec:
      return Behaviour::rec(b.hint(), substitute(b.body(), depth + 1, replacement));
    case Kind::External:
    case Kind::Internal: {
      std::vector<Branch> branches;
      branches.reserve(b.branches().size());
      for (const auto& br : b.branches()) branches.push_back({br.label, substitute(br.next, depth, replacement)});
      return Behaviour::choice(b.kind(), std::move(branches), b.checkpointed());
    }
  }
  return b;
}

Behaviour unfold_once(const Behaviour& b) {
  if (b.kind() != Kind::Rec) return b;
  return substitute(b.body(), 0, b);
}

Behaviour unfold(const Behaviour& b) {
  Behaviour cur = b;
  while (cur.kind() == Kind::Rec) cur = unfold_once(cur);
  return cur;
}

WellFormedBehaviour unfold(const WellFormedBehaviour& b) {
  if (b->kind() != Kind::Rec) return b;
  return Trusted::wrap(unfold(b.term()));
}

WellFormedBehaviour branch_target(const WellFormedBehaviour& choice, std::string_view label) {
  const Behaviour* next = choice->find(label);
  if (next == nullptr) throw std::out_of_range("no branch labelled '" + std::string(label) + "'");
  return Trusted::wrap(*next);
}

std::size_t depth(const Behaviour& b) {
  switch (b.kind()) {
    case Kind::Success:
    case Kind::Var:
      return 0;
    case Kind::Rec:
      return depth(b.body());
    case Kind::External:
    case Kind::Internal: {
      std::size_t deepest = 0;
      for (const auto& br : b.branches()) deepest = std::max(deepest, depth(br.next));
      return deepest + 1;
    }
  }
  return 0;
}

bool StateClosure::contains(const Behaviour& b) const {
  return std::any_of(states.begin(), states.end(), [&](const WellFormedBehaviour& s) { return s.term() == b; });
}

std::size_t StateClosure::checkpointed_count() const {
  return static_cast<std::size_t>(std::count_if(states.begin(), states.end(), [](const WellFormedBehaviour& s) {
    return s->is_choice() && s->checkpointed();
  }));
}

std::size_t StateClosure::head_count() const {
  return static_cast<std::size_t>(std::count_if(
      states.begin(), states.end(), [](const WellFormedBehaviour& s) { return s->kind() != Kind::Rec; }));
}

StateClosure state_closure(const WellFormedBehaviour& root, std::size_t cap) {
  StateClosure closure;
  std::unordered_set<Behaviour, BehaviourHash> seen;
  std::deque<Behaviour> frontier;
  auto visit = [&](const Behaviour& b) {
    if (seen.insert(b).second) {
      if (seen.size() > cap) throw StateCapExceeded(cap);
      closure.states.push_back(Trusted::wrap(b));
      frontier.push_back(b);
    }
  };
  visit(root.term());
  while (!frontier.empty()) {
    Behaviour cur = frontier.front();
    frontier.pop_front();
    if (cur.kind() == Kind::Rec) {
      visit(unfold_once(cur));
    } else if (cur.is_choice()) {
      for (const auto& br : cur.branches()) visit(br.next);
    }
  }
  return closure;
}

}  // namespace sbck

#pragma once

#include "sbck/syntax.hpp"

namespace sbck {

// Wraps terms that are well-formed by construction (images of dual, erase,
// unfold and branch descent applied to well-formed input).
struct Trusted {
  static WellFormedBehaviour wrap(Behaviour b) { return WellFormedBehaviour(std::move(b)); }
};

}  // namespace sbck

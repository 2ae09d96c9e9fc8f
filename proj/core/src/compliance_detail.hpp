#pragma once

#include <optional>

#include "sbck/compliance.hpp"

namespace sbck::detail {

/// Shortest reduction path from `start` to `target`, or nullopt if
/// `target` is unreachable.
std::optional<ViolationPath> path_to(const SystemState& start, const SystemState& target, std::size_t max_states);

/// Judgment reached by the joint rollback of a state whose pasts are both
/// checkpointed.
inline Judgment rolled_back(const Judgment& j) {
  return {Config(Past::none(), j.client.past().behaviour()), Config(Past::none(), j.server.past().behaviour())};
}

}  // namespace sbck::detail

#include <deque>
#include <unordered_set>

#include "sbck/compliance.hpp"

namespace sbck {

std::size_t StandardState::hash() const {
  std::hash<std::string> h;
  std::size_t a = client.behaviour.term().hash() ^ (h(client.committed) << 1);
  std::size_t b = server.behaviour.term().hash() ^ (h(server.committed) << 1);
  return a * 0x9e3779b97f4a7c15ULL + b;
}

StandardState standard_initial(const WellFormedBehaviour& client, const WellFormedBehaviour& server) {
  return {{unfold(client), {}}, {unfold(server), {}}};
}

namespace {

std::vector<StandardEnd> commits(const StandardEnd& e) {
  std::vector<StandardEnd> out;
  if (e.behaviour->kind() != Kind::Internal || !e.committed.empty()) return out;
  for (const auto& br : e.behaviour->branches()) out.push_back({e.behaviour, br.label});
  return out;
}

// `in` offers the label `out` committed to.
bool can_sync(const StandardEnd& in, const StandardEnd& out) {
  return in.behaviour->kind() == Kind::External && !out.committed.empty() &&
         in.behaviour->find(out.committed) != nullptr;
}

StandardEnd after(const StandardEnd& e, const std::string& label) {
  return {unfold(branch_target(e.behaviour, label)), {}};
}

struct StandardHash {
  std::size_t operator()(const StandardState& s) const noexcept { return s.hash(); }
};

}  // namespace

std::vector<StandardState> standard_steps(const StandardState& s) {
  std::vector<StandardState> out;
  for (auto& c : commits(s.client)) out.push_back({std::move(c), s.server});
  for (auto& c : commits(s.server)) out.push_back({s.client, std::move(c)});
  if (can_sync(s.client, s.server)) {
    out.push_back({after(s.client, s.server.committed), after(s.server, s.server.committed)});
  }
  if (can_sync(s.server, s.client)) {
    out.push_back({after(s.client, s.client.committed), after(s.server, s.client.committed)});
  }
  return out;
}

bool check_standard(const WellFormedBehaviour& client, const WellFormedBehaviour& server,
                    const CheckOptions& options) {
  if (has_checkpoint(client) || has_checkpoint(server)) {
    throw std::invalid_argument("standard compliance is defined on checkpoint-free behaviours; erase them first");
  }
  StandardState start = standard_initial(client, server);
  std::unordered_set<StandardState, StandardHash> seen{start};
  std::deque<StandardState> frontier{start};
  while (!frontier.empty()) {
    StandardState cur = std::move(frontier.front());
    frontier.pop_front();
    auto next = standard_steps(cur);
    if (next.empty() && !cur.client.behaviour->is_success()) return false;
    for (auto& n : next) {
      if (seen.insert(n).second) {
        if (seen.size() > options.max_states) throw StateCapExceeded(options.max_states);
        frontier.push_back(std::move(n));
      }
    }
  }
  return true;
}

}  // namespace sbck

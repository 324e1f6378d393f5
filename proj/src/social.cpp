#include "oppsim/social.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oppsim/mobility.hpp"

namespace oppsim {

void SocialGroups::add_group(std::vector<NodeId> members) {
  if (groups_.empty()) throw ContractError("SocialGroups: group 0 (self) missing");
  std::sort(members.begin(), members.end());
  const std::size_t j = groups_.size();
  for (NodeId m : members) {
    if (!index_.emplace(m, j).second)
      throw ContractError("SocialGroups: node " + std::to_string(m) + " already grouped");
  }
  groups_.push_back(std::move(members));
}

double update_activation(std::span<const double> contact_times, double now, double decay) {
  if (contact_times.empty()) return -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double t : contact_times) {
    const double age = now - t;
    if (age <= 0) throw ContractError("update_activation: contact not in the past");
    sum += std::pow(age, -decay);
  }
  return std::log(sum);
}

SocialGroups detect_groups(NodeId self, const std::map<NodeId, double>& activations,
                           std::size_t max_groups, double gap_ratio) {
  SocialGroups result = SocialGroups::for_self(self);

  std::vector<std::pair<double, NodeId>> ranked;
  ranked.reserve(activations.size());
  for (const auto& [peer, act] : activations)
    if (std::isfinite(act)) ranked.emplace_back(act, peer);
  if (ranked.empty()) return result;

  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  // Drops between consecutive activations; a boundary goes where a drop is
  // prominent relative to the mean of the remaining drops.
  const std::size_t n = ranked.size();
  std::vector<double> drops(n > 1 ? n - 1 : 0);
  double drop_sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    drops[i] = ranked[i].first - ranked[i + 1].first;
    drop_sum += drops[i];
  }

  std::vector<std::vector<NodeId>> groups;
  groups.push_back({ranked[0].second});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double others = drops.size() > 1
                              ? (drop_sum - drops[i]) / static_cast<double>(drops.size() - 1)
                              : 0.0;
    const bool boundary = drops[i] > gap_ratio * others && drops[i] > 0 &&
                          groups.size() < max_groups;
    if (boundary) groups.emplace_back();
    groups.back().push_back(ranked[i + 1].second);
  }

  for (auto& g : groups) result.add_group(std::move(g));
  return result;
}

SocialGroups oracle_groups(NodeId self, const SimConfig& cfg) {
  const CommunityId community = self / cfg.nodes_per_community;
  SocialGroups result = SocialGroups::for_self(self);

  auto community_members = [&](CommunityId c, bool skip_self) {
    std::vector<NodeId> members;
    members.reserve(cfg.nodes_per_community);
    const NodeId base = c * cfg.nodes_per_community;
    for (NodeId n = base; n < base + cfg.nodes_per_community; ++n)
      if (!skip_self || n != self) members.push_back(n);
    return members;
  };

  if (cfg.nodes_per_community > 1) result.add_group(community_members(community, true));

  const ScenarioWiring wiring(cfg.scenario, cfg.communities, cfg.zipf_exp);
  for (CommunityId c : wiring.preference_order(community))
    result.add_group(community_members(c, false));

  return result;
}

}  // namespace oppsim

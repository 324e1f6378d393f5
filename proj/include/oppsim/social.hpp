#ifndef OPPSIM_SOCIAL_HPP
#define OPPSIM_SOCIAL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "oppsim/config.hpp"
#include "oppsim/types.hpp"

namespace oppsim {

/// Ordered partition of a node's known peers by social strength. Group 0 is
/// the node itself; group 1 is the strongest peer group.
class SocialGroups {
 public:
  SocialGroups() = default;
  static SocialGroups for_self(NodeId self) {
    SocialGroups g;
    g.groups_.push_back({self});
    g.index_[self] = 0;
    return g;
  }

  /// Append the next (weaker) group. Members must be disjoint from all
  /// previous groups.
  void add_group(std::vector<NodeId> members);

  std::size_t size() const { return groups_.size(); }  // includes group 0
  std::span<const NodeId> members(std::size_t j) const { return groups_.at(j); }

  /// Index of the group a node belongs to; nullopt for strangers.
  std::optional<std::size_t> group_of(NodeId n) const {
    auto it = index_.find(n);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::vector<NodeId>> groups_;
  std::map<NodeId, std::size_t> index_;
};

/// Memory-style activation of a peer from its contact times: higher when
/// contacts are more frequent and more recent. Returns -infinity for an
/// empty history (peer unranked).
double update_activation(std::span<const double> contact_times, double now, double decay);

/// Cluster peers into groups by splitting the descending activation
/// sequence at prominent gaps: a boundary is placed where a drop exceeds
/// gap_ratio times the mean of the other drops. At most max_groups peer
/// groups are produced.
SocialGroups detect_groups(NodeId self, const std::map<NodeId, double>& activations,
                           std::size_t max_groups, double gap_ratio);

/// Ground-truth groups from the scenario wiring: group 1 is the node's own
/// community, further groups are the other communities in the order the
/// community's traveller prefers to visit them.
SocialGroups oracle_groups(NodeId self, const SimConfig& cfg);

}  // namespace oppsim

#endif  // OPPSIM_SOCIAL_HPP

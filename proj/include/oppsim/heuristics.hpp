#ifndef OPPSIM_HEURISTICS_HPP
#define OPPSIM_HEURISTICS_HPP

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "oppsim/node.hpp"
#include "oppsim/recognition.hpp"
#include "oppsim/rng.hpp"
#include "oppsim/social.hpp"
#include "oppsim/types.hpp"

namespace oppsim {

/// Mean recognition levels per social group, as seen by one node. Group 0
/// is the node's own levels.
class GroupMeanProvider {
 public:
  virtual ~GroupMeanProvider() = default;
  virtual std::size_t group_count() const = 0;
  virtual double mean_channel_level(std::size_t group, ChannelId ch) const = 0;
  virtual double mean_item_level(std::size_t group, ItemId item) const = 0;
};

/// GroupMeanProvider backed by a node's social groups, its own recognition
/// store and the vectors cached from peers. Members without a cached vector
/// are excluded from the mean; a group with no usable vector reads as 0.
class SocialGroupMeans : public GroupMeanProvider {
 public:
  SocialGroupMeans(const SocialGroups& groups, const RecognitionStore& self,
                   const std::map<NodeId, RecognitionVector>& peer_views);

  std::size_t group_count() const override { return groups_->size(); }
  double mean_channel_level(std::size_t group, ChannelId ch) const override;
  double mean_item_level(std::size_t group, ItemId item) const override;

 private:
  const std::vector<const RecognitionVector*>& group_views(std::size_t group) const;

  const SocialGroups* groups_;
  const RecognitionStore* self_;
  const std::map<NodeId, RecognitionVector>* peer_views_;
  // Lazily resolved member vectors per group (group 0 unused).
  mutable std::vector<std::vector<const RecognitionVector*>> views_;
  mutable std::vector<bool> views_ready_;
};

/// Discretizes a (generally fractional) group mean into the integer level
/// buckets of the social filter: floor, clamped to [0, theta_i].
std::uint32_t bucket_index(double mean, std::uint32_t theta_i);

/// Social pruning of a consideration set. Splits the candidates into
/// buckets of equal (discretized) mean item level within social group
/// `group`, keeps buckets in ascending level until one would overflow the
/// remaining slots, then recurses into that bucket with the next group.
/// Past the last group the choice is uniformly random. Items whose channel
/// is not recognised at group level (mean < theta_c) or whose own level
/// bucket reaches theta_i are dropped at that level.
std::set<ItemId> sch_filter(const std::set<ItemId>& candidates, std::uint32_t slots,
                            std::size_t group, const GroupMeanProvider& views,
                            const ItemCatalog& catalog, std::uint32_t theta_c,
                            std::uint32_t theta_i, Rng& rng);

/// Full cache selection at a contact: relevance for the node itself first
/// (rh_relevant over P = encountered ∪ own OC), then the social steps.
/// - |S| == capacity: keep S as is;
/// - |S| >  capacity: prune S socially starting at group 0;
/// - |S| <  capacity: keep S and top up from the individually discarded
///   remainder, starting at group 1.
std::set<ItemId> select_oc_contents(const NodeState& node, const std::set<ItemId>& encountered,
                                    const GroupMeanProvider& views, const ItemCatalog& catalog,
                                    std::uint32_t theta_c, std::uint32_t theta_i, Rng& rng);

/// Relevant-only cache selection without the social steps: keeps the
/// rh_relevant subset of P, uniformly sampled down to capacity on overflow.
std::set<ItemId> select_oc_contents_rh(const NodeState& node, const std::set<ItemId>& encountered,
                                       const ItemCatalog& catalog, std::uint32_t theta_c,
                                       std::uint32_t theta_i, Rng& rng);

}  // namespace oppsim

#endif  // OPPSIM_HEURISTICS_HPP

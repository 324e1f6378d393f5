#include "oppsim/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace oppsim {

SocialGroupMeans::SocialGroupMeans(const SocialGroups& groups, const RecognitionStore& self,
                                   const std::map<NodeId, RecognitionVector>& peer_views)
    : groups_(&groups),
      self_(&self),
      peer_views_(&peer_views),
      views_(groups.size()),
      views_ready_(groups.size(), false) {}

const std::vector<const RecognitionVector*>& SocialGroupMeans::group_views(
    std::size_t group) const {
  if (!views_ready_[group]) {
    for (NodeId member : groups_->members(group)) {
      auto it = peer_views_->find(member);
      if (it != peer_views_->end()) views_[group].push_back(&it->second);
    }
    views_ready_[group] = true;
  }
  return views_[group];
}

double SocialGroupMeans::mean_channel_level(std::size_t group, ChannelId ch) const {
  if (group == 0) return self_->channel_level(ch);
  const auto& views = group_views(group);
  if (views.empty()) return 0.0;
  double sum = 0.0;
  for (const RecognitionVector* v : views) sum += v->channel_level(ch);
  return sum / static_cast<double>(views.size());
}

double SocialGroupMeans::mean_item_level(std::size_t group, ItemId item) const {
  if (group == 0) return self_->item_level(item);
  const auto& views = group_views(group);
  if (views.empty()) return 0.0;
  double sum = 0.0;
  for (const RecognitionVector* v : views) sum += v->item_level(item);
  return sum / static_cast<double>(views.size());
}

std::uint32_t bucket_index(double mean, std::uint32_t theta_i) {
  if (mean <= 0) return 0;
  const double f = std::floor(mean);
  if (f >= theta_i) return theta_i;
  return static_cast<std::uint32_t>(f);
}

namespace {

std::set<ItemId> random_subset(const std::set<ItemId>& from, std::uint32_t k, Rng& rng) {
  if (from.size() <= k) return from;
  std::vector<ItemId> pool(from.begin(), from.end());
  const std::vector<ItemId> chosen = rng.sample(std::move(pool), k);
  return {chosen.begin(), chosen.end()};
}

}  // namespace

std::set<ItemId> sch_filter(const std::set<ItemId>& candidates, std::uint32_t slots,
                            std::size_t group, const GroupMeanProvider& views,
                            const ItemCatalog& catalog, std::uint32_t theta_c,
                            std::uint32_t theta_i, Rng& rng) {
  if (slots == 0 || candidates.empty()) return {};
  if (group >= views.group_count()) return random_subset(candidates, slots, rng);

  // Bucket candidates by discretized mean item level within this group;
  // items whose channel is not recognised here drop out entirely.
  std::map<std::uint32_t, std::set<ItemId>> buckets;
  for (ItemId item : candidates) {
    if (views.mean_channel_level(group, catalog.channel_of(item)) < theta_c) continue;
    buckets[bucket_index(views.mean_item_level(group, item), theta_i)].insert(item);
  }

  std::set<ItemId> kept;
  for (auto& [level, bucket] : buckets) {
    if (level >= theta_i) break;  // recognised at this group's level
    if (kept.size() + bucket.size() > slots) {
      // This bucket overflows the remaining space: its items are tied at
      // this level, let the next group break the tie.
      std::set<ItemId> rest = sch_filter(bucket, slots - static_cast<std::uint32_t>(kept.size()),
                                         group + 1, views, catalog, theta_c, theta_i, rng);
      kept.insert(rest.begin(), rest.end());
      return kept;
    }
    kept.insert(bucket.begin(), bucket.end());
  }
  return kept;
}

std::set<ItemId> select_oc_contents(const NodeState& node, const std::set<ItemId>& encountered,
                                    const GroupMeanProvider& views, const ItemCatalog& catalog,
                                    std::uint32_t theta_c, std::uint32_t theta_i, Rng& rng) {
  const std::uint32_t capacity = node.oc.capacity();

  std::set<ItemId> pruning = encountered;
  pruning.insert(node.oc.contents().begin(), node.oc.contents().end());

  std::set<ItemId> relevant;
  for (ItemId item : pruning)
    if (rh_relevant(catalog.item(item), node.recognition, theta_c, theta_i))
      relevant.insert(item);

  if (relevant.size() == capacity) return relevant;

  if (relevant.size() > capacity)
    return sch_filter(relevant, capacity, 0, views, catalog, theta_c, theta_i, rng);

  // Underfull: keep the relevant set and revise the individually discarded
  // remainder with social knowledge, skipping the individual step.
  std::set<ItemId> discarded;
  std::set_difference(pruning.begin(), pruning.end(), relevant.begin(), relevant.end(),
                      std::inserter(discarded, discarded.begin()));
  std::set<ItemId> extra =
      sch_filter(discarded, capacity - static_cast<std::uint32_t>(relevant.size()), 1, views,
                 catalog, theta_c, theta_i, rng);
  relevant.insert(extra.begin(), extra.end());
  return relevant;
}

std::set<ItemId> select_oc_contents_rh(const NodeState& node, const std::set<ItemId>& encountered,
                                       const ItemCatalog& catalog, std::uint32_t theta_c,
                                       std::uint32_t theta_i, Rng& rng) {
  std::set<ItemId> pruning = encountered;
  pruning.insert(node.oc.contents().begin(), node.oc.contents().end());

  std::set<ItemId> relevant;
  for (ItemId item : pruning)
    if (rh_relevant(catalog.item(item), node.recognition, theta_c, theta_i))
      relevant.insert(item);

  return random_subset(relevant, node.oc.capacity(), rng);
}

}  // namespace oppsim

#ifndef OPPSIM_RECOGNITION_HPP
#define OPPSIM_RECOGNITION_HPP

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "oppsim/types.hpp"

namespace oppsim {

/// Snapshot of one node's recognition levels at one instant, as exchanged
/// with peers on contact. Indexed by dense channel/item ids; missing ids
/// read as level 0.
struct RecognitionVector {
  std::vector<std::uint16_t> channel_levels;
  std::vector<std::uint16_t> item_levels;

  std::uint32_t channel_level(ChannelId ch) const {
    return ch < channel_levels.size() ? channel_levels[ch] : 0;
  }
  std::uint32_t item_level(ItemId id) const {
    return id < item_levels.size() ? item_levels[id] : 0;
  }
};

/// Per-node recognition counters. A channel's level counts the distinct
/// subscribers of that channel met so far; an item's level counts how many
/// encountered nodes were carrying it (at most one sighting per contact).
class RecognitionStore {
 public:
  std::uint32_t channel_level(ChannelId ch) const {
    return ch < subscribers_.size() ? static_cast<std::uint32_t>(subscribers_[ch].size()) : 0;
  }

  std::uint32_t item_level(ItemId id) const {
    return id < sightings_.size() ? sightings_[id] : 0;
  }

  /// Call once per contact per direction; peer_items must already be
  /// deduplicated across the peer's caches.
  void record_contact(NodeId peer, ChannelId peer_subscription,
                      const std::set<ItemId>& peer_items) {
    if (peer_subscription >= subscribers_.size()) subscribers_.resize(peer_subscription + 1);
    subscribers_[peer_subscription].insert(peer);
    for (ItemId id : peer_items) {
      if (id >= sightings_.size()) sightings_.resize(id + 1, 0);
      ++sightings_[id];
    }
  }

  /// Forget an item's sightings (interest changes re-set counters for the
  /// newly subscribed channel's items).
  void reset_item(ItemId id) {
    if (id < sightings_.size()) sightings_[id] = 0;
  }

  RecognitionVector snapshot(std::size_t channel_count, std::size_t item_count) const {
    RecognitionVector v;
    v.channel_levels.resize(channel_count, 0);
    for (std::size_t ch = 0; ch < channel_count && ch < subscribers_.size(); ++ch)
      v.channel_levels[ch] =
          static_cast<std::uint16_t>(std::min<std::size_t>(subscribers_[ch].size(), 0xffff));
    v.item_levels.resize(item_count, 0);
    for (std::size_t id = 0; id < item_count && id < sightings_.size(); ++id)
      v.item_levels[id] = static_cast<std::uint16_t>(std::min<std::uint32_t>(sightings_[id], 0xffff));
    return v;
  }

 private:
  std::vector<std::set<NodeId>> subscribers_;  // by channel
  std::vector<std::uint32_t> sightings_;       // by item
};

/// Core relevance rule: keep an item iff its channel is recognised and the
/// item itself is not yet recognised.
inline bool rh_relevant(std::uint32_t channel_level, std::uint32_t item_level,
                        std::uint32_t theta_c, std::uint32_t theta_i) {
  return channel_level >= theta_c && item_level < theta_i;
}

inline bool rh_relevant(const DataItem& item, const RecognitionStore& store,
                        std::uint32_t theta_c, std::uint32_t theta_i) {
  return rh_relevant(store.channel_level(item.channel), store.item_level(item.id), theta_c,
                     theta_i);
}

}  // namespace oppsim

#endif  // OPPSIM_RECOGNITION_HPP

#ifndef OPPSIM_NODE_HPP
#define OPPSIM_NODE_HPP

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "oppsim/caches.hpp"
#include "oppsim/recognition.hpp"
#include "oppsim/types.hpp"

namespace oppsim {

/// Everything one mobile node carries through a run.
struct NodeState {
  NodeId id = 0;
  CommunityId community = 0;
  bool traveller = false;
  ChannelId subscription = 0;
  Vec2 position;

  LocalItemsCache li;
  OpportunisticCache oc;
  RecognitionStore recognition;

  // Last vector received from each peer, kept until overwritten.
  std::map<NodeId, RecognitionVector> peer_views;

  // Items of the current subscription consumed so far; reset when the
  // subscription changes.
  std::set<ItemId> delivered;

  std::map<NodeId, std::uint32_t> contact_counts;
  std::map<NodeId, std::vector<double>> contact_history;

  /// li ∪ oc — what this node would summarise to a peer.
  std::set<ItemId> cache_summary() const {
    std::set<ItemId> s = li.contents;
    s.insert(oc.contents().begin(), oc.contents().end());
    return s;
  }

  bool holds(ItemId item) const { return li.contains(item) || oc.contains(item); }

  void note_contact(NodeId peer, double t) {
    ++contact_counts[peer];
    contact_history[peer].push_back(t);
  }
};

}  // namespace oppsim

#endif  // OPPSIM_NODE_HPP

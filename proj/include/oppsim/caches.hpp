#ifndef OPPSIM_CACHES_HPP
#define OPPSIM_CACHES_HPP

#include <cstdint>
#include <set>
#include <string>

#include "oppsim/types.hpp"

namespace oppsim {

/// Bounded cache a node donates to carry other nodes' items. Contents are
/// replaced wholesale by the selection policy; the capacity bound holds at
/// every observable instant.
class OpportunisticCache {
 public:
  explicit OpportunisticCache(std::uint32_t capacity = 0) : capacity_(capacity) {}

  std::uint32_t capacity() const { return capacity_; }
  const std::set<ItemId>& contents() const { return contents_; }
  std::size_t size() const { return contents_.size(); }
  bool contains(ItemId id) const { return contents_.count(id) != 0; }

  /// Drop-and-replace; anything not in new_contents is gone.
  void replace(std::set<ItemId> new_contents) {
    if (new_contents.size() > capacity_)
      throw ContractError("OpportunisticCache::replace: " +
                          std::to_string(new_contents.size()) + " items exceed capacity " +
                          std::to_string(capacity_));
    contents_ = std::move(new_contents);
  }

  void erase(ItemId id) { contents_.erase(id); }

 private:
  std::uint32_t capacity_;
  std::set<ItemId> contents_;
};

/// Unbounded store of the items generated at this node. Items only ever
/// leave through expiry.
struct LocalItemsCache {
  std::set<ItemId> contents;

  void insert(ItemId id) { contents.insert(id); }
  bool contains(ItemId id) const { return contents.count(id) != 0; }
  void erase(ItemId id) { contents.erase(id); }
  std::size_t size() const { return contents.size(); }
};

}  // namespace oppsim

#endif  // OPPSIM_CACHES_HPP

#ifndef OPPSIM_TYPES_HPP
#define OPPSIM_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oppsim {

using NodeId = std::uint32_t;
using ItemId = std::uint32_t;
using ChannelId = std::uint32_t;
using CommunityId = std::uint32_t;

/// Broken internal invariant (a bug in the caller, not bad user input).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Invalid user-supplied configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// One content unit. Items belong to exactly one channel and never change
/// channel after creation.
struct DataItem {
  ItemId id = 0;
  ChannelId channel = 0;
  double created_at = 0.0;
  std::optional<double> expires_at;  // absent = never expires

  bool expired(double t) const { return expires_at && *expires_at <= t; }
};

/// All items ever created in one simulation run. Ids are dense integers
/// assigned in creation order; entries are never removed (expiry only
/// empties caches, the catalog keeps the record).
class ItemCatalog {
 public:
  ItemCatalog() = default;
  explicit ItemCatalog(std::size_t channels) : per_channel_(channels, 0) {}

  ChannelId add_channel() {
    per_channel_.push_back(0);
    return static_cast<ChannelId>(per_channel_.size() - 1);
  }

  ItemId create(ChannelId channel, double created_at,
                std::optional<double> expires_at = std::nullopt) {
    if (channel >= per_channel_.size())
      throw ContractError("ItemCatalog::create: unknown channel " + std::to_string(channel));
    if (expires_at && *expires_at <= created_at)
      throw ContractError("ItemCatalog::create: expiry must be after creation");
    const ItemId id = static_cast<ItemId>(items_.size());
    items_.push_back(DataItem{id, channel, created_at, expires_at});
    ++per_channel_[channel];
    return id;
  }

  const DataItem& item(ItemId id) const { return items_.at(id); }
  ChannelId channel_of(ItemId id) const { return items_.at(id).channel; }

  std::size_t size() const { return items_.size(); }
  std::size_t channel_count() const { return per_channel_.size(); }

  /// Items created so far for a channel; expiry does not shrink this.
  std::uint32_t channel_item_count(ChannelId ch) const { return per_channel_.at(ch); }

  const std::vector<DataItem>& items() const { return items_; }

 private:
  std::vector<DataItem> items_;
  std::vector<std::uint32_t> per_channel_;
};

}  // namespace oppsim

#endif  // OPPSIM_TYPES_HPP

#ifndef OPPSIM_TESTS_SUPPORT_HPP
#define OPPSIM_TESTS_SUPPORT_HPP

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "oppsim/heuristics.hpp"
#include "oppsim/rng.hpp"
#include "oppsim/types.hpp"

namespace oppsim::test {

/// Mean-level table with explicit entries per (group, subject); channels
/// default to `default_channel_level`, items to 0.
class FakeMeans : public GroupMeanProvider {
 public:
  explicit FakeMeans(std::size_t groups, double default_channel_level = 1e9)
      : groups_(groups), default_channel_(default_channel_level) {}

  void set_channel(std::size_t group, ChannelId ch, double level) {
    channel_[{group, ch}] = level;
  }
  void set_item(std::size_t group, ItemId item, double level) { item_[{group, item}] = level; }

  std::size_t group_count() const override { return groups_; }

  double mean_channel_level(std::size_t group, ChannelId ch) const override {
    auto it = channel_.find({group, ch});
    return it == channel_.end() ? default_channel_ : it->second;
  }

  double mean_item_level(std::size_t group, ItemId item) const override {
    auto it = item_.find({group, item});
    return it == item_.end() ? 0.0 : it->second;
  }

 private:
  std::size_t groups_;
  double default_channel_;
  std::map<std::pair<std::size_t, ChannelId>, double> channel_;
  std::map<std::pair<std::size_t, ItemId>, double> item_;
};

/// Independent trace of the social filter, written straight from the bucket
/// definition: for each level i in ascending order, collect the bucket by
/// rescanning the candidate set, stop at the first bucket that overflows
/// and recurse into it with the next group. Past the last group, a uniform
/// random subset (same partial-shuffle convention as the library, so
/// results are comparable draw for draw).
inline std::set<ItemId> oracle_sch(const std::set<ItemId>& candidates, std::uint32_t slots,
                                   std::size_t group, const GroupMeanProvider& views,
                                   const ItemCatalog& catalog, std::uint32_t theta_c,
                                   std::uint32_t theta_i, Rng& rng) {
  if (slots == 0 || candidates.empty()) return {};

  if (group >= views.group_count()) {
    if (candidates.size() <= slots) return candidates;
    std::vector<ItemId> pool(candidates.begin(), candidates.end());
    const std::vector<ItemId> picked = rng.sample(std::move(pool), slots);
    return {picked.begin(), picked.end()};
  }

  std::set<ItemId> kept;
  for (std::uint32_t level = 0; level < theta_i; ++level) {
    std::set<ItemId> bucket;
    for (ItemId item : candidates) {
      if (views.mean_channel_level(group, catalog.channel_of(item)) < theta_c) continue;
      const double mean = views.mean_item_level(group, item);
      std::uint32_t b = mean <= 0 ? 0 : static_cast<std::uint32_t>(std::floor(mean));
      if (b > theta_i) b = theta_i;
      if (b == level) bucket.insert(item);
    }
    if (bucket.empty()) continue;
    if (kept.size() + bucket.size() > slots) {
      std::set<ItemId> tail =
          oracle_sch(bucket, slots - static_cast<std::uint32_t>(kept.size()), group + 1, views,
                     catalog, theta_c, theta_i, rng);
      kept.insert(tail.begin(), tail.end());
      return kept;
    }
    kept.insert(bucket.begin(), bucket.end());
  }
  return kept;
}

/// Random instance generator for equivalence testing: small catalogs,
/// fractional level tables, varying thresholds.
struct SchCase {
  ItemCatalog catalog;
  std::set<ItemId> candidates;
  std::uint32_t slots = 0;
  FakeMeans means{1};
  std::uint32_t theta_c = 1;
  std::uint32_t theta_i = 1;
};

inline SchCase random_sch_case(Rng& rng) {
  SchCase c;
  const std::size_t channels = 1 + rng.index(2);
  c.catalog = ItemCatalog(channels);
  const std::size_t items = rng.index(9);  // |S| <= 8
  c.theta_c = 1 + static_cast<std::uint32_t>(rng.index(3));
  c.theta_i = 1 + static_cast<std::uint32_t>(rng.index(3));
  c.slots = static_cast<std::uint32_t>(rng.index(5));  // O <= 4
  const std::size_t groups = 1 + rng.index(3);

  c.means = FakeMeans(groups, /*default_channel_level=*/0.0);
  for (std::size_t i = 0; i < items; ++i) {
    const ChannelId ch = static_cast<ChannelId>(rng.index(channels));
    c.candidates.insert(c.catalog.create(ch, 0.0));
  }
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t ch = 0; ch < channels; ++ch)
      c.means.set_channel(g, static_cast<ChannelId>(ch),
                          rng.uniform(0.0, c.theta_c + 1.5));
    for (ItemId item : c.candidates)
      c.means.set_item(g, item, rng.uniform(0.0, c.theta_i + 1.5));
  }
  return c;
}

}  // namespace oppsim::test

#endif  // OPPSIM_TESTS_SUPPORT_HPP

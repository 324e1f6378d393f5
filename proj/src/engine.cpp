#include "oppsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "oppsim/heuristics.hpp"

namespace oppsim {

namespace {

// One side of an exchange: consume subscribed items seen on the peer, then
// replace the OC with the policy's selection. Returns the item copies this
// side had to fetch.
std::uint64_t side_update(NodeState& n, const std::set<ItemId>& peer_items,
                          const SocialGroups& groups, const ItemCatalog& catalog,
                          const PolicyParams& params, Rng& rng) {
  std::set<ItemId> to_fetch;

  // Subscribed items are consumed whether or not they get stored.
  for (ItemId item : peer_items) {
    if (catalog.channel_of(item) != n.subscription) continue;
    if (n.delivered.count(item)) continue;
    n.delivered.insert(item);
    if (!n.holds(item)) to_fetch.insert(item);
  }

  std::set<ItemId> next;
  if (params.policy == Policy::RH) {
    next = select_oc_contents_rh(n, peer_items, catalog, params.theta_c, params.theta_i, rng);
  } else {
    SocialGroupMeans views(groups, n.recognition, n.peer_views);
    next = select_oc_contents(n, peer_items, views, catalog, params.theta_c, params.theta_i, rng);
  }

  for (ItemId item : next)
    if (!n.holds(item)) to_fetch.insert(item);

  n.oc.replace(std::move(next));
  return to_fetch.size();
}

}  // namespace

ExchangeStats handle_contact(NodeState& a, NodeState& b, const SocialGroups& ga,
                             const SocialGroups& gb, const ItemCatalog& catalog,
                             const PolicyParams& params, double /*t*/, Rng& rng) {
  const std::set<ItemId> a_items = a.cache_summary();
  const std::set<ItemId> b_items = b.cache_summary();

  // Vectors cross simultaneously: both snapshots predate this contact.
  RecognitionVector a_vec = a.recognition.snapshot(catalog.channel_count(), catalog.size());
  RecognitionVector b_vec = b.recognition.snapshot(catalog.channel_count(), catalog.size());

  a.recognition.record_contact(b.id, b.subscription, b_items);
  b.recognition.record_contact(a.id, a.subscription, a_items);
  a.peer_views[b.id] = std::move(b_vec);
  b.peer_views[a.id] = std::move(a_vec);

  ExchangeStats stats;
  stats.control = 2;  // one summary + recognition-vector message per direction
  stats.data += side_update(a, b_items, ga, catalog, params, rng);
  stats.data += side_update(b, a_items, gb, catalog, params, rng);
  return stats;
}

std::vector<std::uint64_t> group_contact_totals(const SocialGroups& groups,
                                                const std::map<NodeId, std::uint32_t>& counts) {
  std::vector<std::uint64_t> totals(groups.size(), 0);
  for (const auto& [peer, count] : counts) {
    if (auto j = groups.group_of(peer); j && *j > 0) totals[*j] += count;
  }
  return totals;
}

double social_accept_probability(const SocialGroups& groups,
                                 std::span<const std::uint64_t> group_contacts, NodeId peer,
                                 double p0, bool inverse) {
  const std::size_t peer_groups = groups.size() > 0 ? groups.size() - 1 : 0;
  if (peer_groups == 0) return p0;

  // Preference order over group indices 1..n: most-met first for direct,
  // least-met first for inverse; ties by group index.
  std::vector<std::size_t> order(peer_groups);
  for (std::size_t i = 0; i < peer_groups; ++i) order[i] = i + 1;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const std::uint64_t cx = x < group_contacts.size() ? group_contacts[x] : 0;
    const std::uint64_t cy = y < group_contacts.size() ? group_contacts[y] : 0;
    return inverse ? cx < cy : cx > cy;
  });

  std::size_t rank = peer_groups - 1;  // strangers rank last
  if (auto j = groups.group_of(peer); j && *j > 0) {
    for (std::size_t r = 0; r < order.size(); ++r)
      if (order[r] == *j) {
        rank = r;
        break;
      }
  }
  return std::ldexp(p0, -static_cast<int>(rank));
}

bool exchange_gate(const NodeState& a, const NodeState& b, const SocialGroups& ga,
                   const SocialGroups& gb, const SelfishnessDescriptor& selfish, Rng& rng) {
  switch (selfish.kind) {
    case SelfishnessDescriptor::Kind::None:
      return true;
    case SelfishnessDescriptor::Kind::Uniform: {
      const double q = std::sqrt(selfish.joint_p);
      const bool ok_a = rng.bernoulli(q);
      const bool ok_b = rng.bernoulli(q);
      return ok_a && ok_b;
    }
    case SelfishnessDescriptor::Kind::Social: {
      const auto ca = group_contact_totals(ga, a.contact_counts);
      const auto cb = group_contact_totals(gb, b.contact_counts);
      const double pa = social_accept_probability(ga, ca, b.id, selfish.p0, selfish.inverse);
      const double pb = social_accept_probability(gb, cb, a.id, selfish.p0, selfish.inverse);
      const bool ok_a = rng.bernoulli(pa);
      const bool ok_b = rng.bernoulli(pb);
      return ok_a && ok_b;
    }
  }
  return true;
}

double equivalent_uniform_p(std::span<const double> group_sizes,
                            std::span<const double> group_probs) {
  if (group_sizes.empty() || group_sizes.size() != group_probs.size())
    throw ContractError("equivalent_uniform_p: sizes and probs must align and be non-empty");
  double weighted = 0.0, total = 0.0;
  for (std::size_t k = 0; k < group_sizes.size(); ++k) {
    if (group_sizes[k] <= 0) throw ContractError("equivalent_uniform_p: empty group");
    weighted += group_sizes[k] * group_probs[k];
    total += group_sizes[k];
  }
  const double sqrt_p = weighted / total;
  return sqrt_p * sqrt_p;
}

std::vector<double> dynamics_schedule(const DynamicsDescriptor& dyn, double duration) {
  std::vector<double> times;
  switch (dyn.kind) {
    case DynamicsDescriptor::Kind::None:
      break;
    case DynamicsDescriptor::Kind::SubscriptionRotation:
    case DynamicsDescriptor::Kind::NewChannel:
    case DynamicsDescriptor::Kind::ItemDoubling:
      if (dyn.at_s > 0 && dyn.at_s < duration) times.push_back(dyn.at_s);
      break;
    case DynamicsDescriptor::Kind::PeriodicInjection:
      for (double t = dyn.at_s; t < duration; t += dyn.period_s) times.push_back(t);
      break;
  }
  return times;
}

namespace {

constexpr double kTimeEps = 1e-6;

bool scheduled_at(const DynamicsDescriptor& dyn, double t) {
  switch (dyn.kind) {
    case DynamicsDescriptor::Kind::None:
      return false;
    case DynamicsDescriptor::Kind::SubscriptionRotation:
    case DynamicsDescriptor::Kind::NewChannel:
    case DynamicsDescriptor::Kind::ItemDoubling:
      return std::abs(t - dyn.at_s) < kTimeEps;
    case DynamicsDescriptor::Kind::PeriodicInjection: {
      if (t + kTimeEps < dyn.at_s) return false;
      const double k = (t - dyn.at_s) / dyn.period_s;
      return std::abs(k - std::round(k)) * dyn.period_s < kTimeEps;
    }
  }
  return false;
}

std::optional<double> sample_ttl(const TtlDescriptor& ttl, double now, Rng& rng) {
  if (!ttl.enabled) return std::nullopt;
  const double life = std::max(ttl.floor_s, rng.gaussian(ttl.mean_s, ttl.sigma_s));
  return now + life;
}

// A freshly placed item lands in the owner's LI; if the owner subscribes to
// its channel it is consumed on the spot.
void give_item(World& world, NodeState& owner, ItemId item) {
  owner.li.insert(item);
  if (world.catalog.channel_of(item) == owner.subscription) owner.delivered.insert(item);
}

void inject_uniform(World& world, ChannelId channel, std::uint32_t count, double t,
                    const TtlDescriptor& ttl, Rng& rng) {
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto expires = sample_ttl(ttl, t, rng);
    const ItemId item = world.catalog.create(channel, t, expires);
    if (expires) world.pending_expiry.insert({*expires, item});
    give_item(world, world.nodes[rng.index(world.nodes.size())], item);
  }
}

}  // namespace

void apply_dynamics(World& world, double t, const DynamicsDescriptor& dyn, const SimConfig& cfg,
                    Rng& rng) {
  if (!scheduled_at(dyn, t)) return;

  switch (dyn.kind) {
    case DynamicsDescriptor::Kind::None:
      break;

    case DynamicsDescriptor::Kind::SubscriptionRotation: {
      const std::uint32_t channels = static_cast<std::uint32_t>(world.catalog.channel_count());
      for (NodeState& n : world.nodes) {
        if (n.traveller) continue;
        n.subscription = (n.subscription + 1) % channels;
        // Fresh interest: item counters of the new channel restart from
        // zero, channel counters are untouched.
        for (const DataItem& item : world.catalog.items())
          if (item.channel == n.subscription) n.recognition.reset_item(item.id);
        n.delivered.clear();
        for (ItemId item : n.cache_summary())
          if (world.catalog.channel_of(item) == n.subscription) n.delivered.insert(item);
      }
      break;
    }

    case DynamicsDescriptor::Kind::NewChannel: {
      const ChannelId fresh = world.catalog.add_channel();
      inject_uniform(world, fresh, dyn.items, t, cfg.ttl, rng);

      std::vector<NodeId> population;
      for (CommunityId c = 0; c < cfg.communities; ++c) {
        std::vector<NodeId> residents;
        const NodeId base = c * cfg.nodes_per_community;
        for (NodeId n = base; n < base + cfg.nodes_per_community; ++n)
          if (!world.nodes[n].traveller) residents.push_back(n);
        const std::uint32_t want = std::min<std::uint32_t>(
            dyn.subscribers_per_community,
            static_cast<std::uint32_t>(residents.size()));
        for (NodeId n : rng.sample(std::move(residents), want)) {
          NodeState& node = world.nodes[n];
          node.subscription = fresh;
          node.delivered.clear();
          for (ItemId item : node.cache_summary())
            if (world.catalog.channel_of(item) == fresh) node.delivered.insert(item);
          population.push_back(n);
        }
      }
      std::sort(population.begin(), population.end());
      world.hr_population = std::move(population);
      break;
    }

    case DynamicsDescriptor::Kind::ItemDoubling: {
      for (ChannelId ch = 0; ch < world.catalog.channel_count(); ++ch)
        inject_uniform(world, ch, cfg.items_per_channel, t, cfg.ttl, rng);
      break;
    }

    case DynamicsDescriptor::Kind::PeriodicInjection: {
      for (ChannelId ch = 0; ch < world.catalog.channel_count(); ++ch)
        inject_uniform(world, ch, dyn.items, t, cfg.ttl, rng);
      break;
    }
  }
}

void expire_ttl(World& world, double t) {
  if (world.pending_expiry.empty() || world.pending_expiry.begin()->first > t) return;
  std::vector<ItemId> expired;
  while (!world.pending_expiry.empty() && world.pending_expiry.begin()->first <= t) {
    expired.push_back(world.pending_expiry.begin()->second);
    world.pending_expiry.erase(world.pending_expiry.begin());
  }
  for (NodeState& n : world.nodes) {
    for (ItemId item : expired) {
      n.li.erase(item);
      n.oc.erase(item);
    }
  }
}

std::vector<std::uint32_t> subscription_split(std::uint32_t nodes, std::uint32_t channels,
                                              double zipf_exp) {
  std::vector<double> quota(channels);
  double total = 0.0;
  for (std::uint32_t r = 0; r < channels; ++r) total += std::pow(r + 1, -zipf_exp);
  for (std::uint32_t r = 0; r < channels; ++r)
    quota[r] = nodes * std::pow(r + 1, -zipf_exp) / total;

  std::vector<std::uint32_t> counts(channels);
  std::uint32_t assigned = 0;
  for (std::uint32_t r = 0; r < channels; ++r) {
    counts[r] = static_cast<std::uint32_t>(std::floor(quota[r]));
    assigned += counts[r];
  }
  // Largest remainder, ties to the more popular rank.
  std::vector<std::uint32_t> order(channels);
  for (std::uint32_t r = 0; r < channels; ++r) order[r] = r;
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return quota[x] - std::floor(quota[x]) > quota[y] - std::floor(quota[y]);
  });
  for (std::uint32_t i = 0; assigned < nodes; ++i, ++assigned) ++counts[order[i % channels]];
  return counts;
}

Simulation::Simulation(SimConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
  cfg_.validate();
  build_world(rng_);
  mobility_.emplace(cfg_, rng_);
  tracker_.emplace(cfg_.node_count(), cfg_.tx_range_m);
  for (NodeId n = 0; n < world_.nodes.size(); ++n)
    world_.nodes[n].position = mobility_->position(n);

  series_.scenario = to_string(cfg_.scenario);
  series_.policy = to_string(cfg_.policy);
  series_.rt = cfg_.theta_i;
  series_.seed = cfg_.seed;
}

void Simulation::build_world(Rng& rng) {
  world_.catalog = ItemCatalog(cfg_.channels);

  const std::uint32_t travellers =
      ScenarioWiring::travellers_per_community(cfg_.scenario, cfg_.communities);
  const std::vector<std::uint32_t> split =
      subscription_split(cfg_.nodes_per_community, cfg_.channels, cfg_.zipf_exp);

  world_.nodes.reserve(cfg_.node_count());
  for (CommunityId c = 0; c < cfg_.communities; ++c) {
    // Popularity rank r within community c maps to channel (c + r) mod C.
    std::vector<ChannelId> by_slot;
    for (std::uint32_t r = 0; r < cfg_.channels; ++r)
      for (std::uint32_t i = 0; i < split[r]; ++i)
        by_slot.push_back((c + r) % cfg_.channels);

    for (std::uint32_t slot = 0; slot < cfg_.nodes_per_community; ++slot) {
      NodeState n;
      n.id = static_cast<NodeId>(world_.nodes.size());
      n.community = c;
      n.traveller = slot < travellers;
      n.subscription = by_slot[slot];
      n.oc = OpportunisticCache(cfg_.oc_capacity);
      world_.nodes.push_back(std::move(n));
    }
  }

  // Initial items: owner per placement mode, straight into the owner's LI.
  for (ChannelId ch = 0; ch < cfg_.channels; ++ch) {
    for (std::uint32_t i = 0; i < cfg_.items_per_channel; ++i) {
      const auto expires = sample_ttl(cfg_.ttl, 0.0, rng);
      const ItemId item = world_.catalog.create(ch, 0.0, expires);
      if (expires) world_.pending_expiry.insert({*expires, item});

      NodeId owner = 0;
      if (cfg_.placement == PlacementMode::Uniform) {
        owner = static_cast<NodeId>(rng.index(world_.nodes.size()));
      } else {
        // Community by (direct or reciprocal) popularity of the channel.
        std::vector<double> weight(cfg_.communities);
        double total = 0.0;
        for (CommunityId c = 0; c < cfg_.communities; ++c) {
          const std::uint32_t rank = (ch + cfg_.channels - c) % cfg_.channels;
          const double w = std::pow(rank + 1, -cfg_.zipf_exp);
          weight[c] = cfg_.placement == PlacementMode::Popularity ? w : 1.0 / w;
          total += weight[c];
        }
        double u = rng.uniform() * total;
        CommunityId chosen = cfg_.communities - 1;
        for (CommunityId c = 0; c < cfg_.communities; ++c) {
          if (u < weight[c]) {
            chosen = c;
            break;
          }
          u -= weight[c];
        }
        owner = chosen * cfg_.nodes_per_community +
                static_cast<NodeId>(rng.index(cfg_.nodes_per_community));
      }
      give_item(world_, world_.nodes[owner], item);
    }
  }

  // Social groups: ground truth up front, or self-only until the first
  // activation refresh.
  world_.groups.reserve(world_.nodes.size());
  for (const NodeState& n : world_.nodes) {
    world_.groups.push_back(cfg_.community_mode == CommunityMode::Oracle
                                ? oracle_groups(n.id, cfg_)
                                : SocialGroups::for_self(n.id));
  }
  group_contacts_.assign(world_.nodes.size(), {});
  for (NodeId n = 0; n < world_.nodes.size(); ++n)
    group_contacts_[n].assign(world_.groups[n].size(), 0);
}

void Simulation::refresh_groups(double now) {
  for (NodeId n = 0; n < world_.nodes.size(); ++n) {
    std::map<NodeId, double> activations;
    for (const auto& [peer, times] : world_.nodes[n].contact_history) {
      const double act = update_activation(times, now, cfg_.community_decay);
      if (std::isfinite(act)) activations[peer] = act;
    }
    if (activations.empty()) continue;
    world_.groups[n] =
        detect_groups(n, activations, cfg_.community_max_groups, cfg_.community_gap_ratio);
    group_contacts_[n] =
        group_contact_totals(world_.groups[n], world_.nodes[n].contact_counts);
  }
}

void Simulation::sample(double t) {
  const double hr = hit_rate(world_.nodes, world_.catalog, world_.hr_population);
  series_.samples.push_back({t, hr, static_cast<double>(overhead_.total()),
                             static_cast<double>(overhead_.data),
                             static_cast<double>(overhead_.control)});
}

void Simulation::check_invariants(double t) const {
  for (const NodeState& n : world_.nodes) {
    if (n.oc.size() > n.oc.capacity())
      throw ContractError("invariant: OC over capacity at t=" + std::to_string(t));
    for (ItemId item : n.oc.contents())
      if (world_.catalog.item(item).expired(t))
        throw ContractError("invariant: expired item in OC at t=" + std::to_string(t));
    for (ItemId item : n.li.contents)
      if (world_.catalog.item(item).expired(t))
        throw ContractError("invariant: expired item in LI at t=" + std::to_string(t));
    for (ItemId item : n.delivered)
      if (world_.catalog.channel_of(item) != n.subscription)
        throw ContractError("invariant: delivered item off-channel at t=" + std::to_string(t));
  }
}

void Simulation::log_event(double t, const std::string& kind, const std::string& detail) {
  if (!event_log_) return;
  (*event_log_) << "{\"t\":" << t << ",\"event\":\"" << kind << "\"";
  if (!detail.empty()) (*event_log_) << "," << detail;
  (*event_log_) << "}\n";
}

MetricsSeries Simulation::run() {
  const PolicyParams params{cfg_.policy, cfg_.theta_c, cfg_.theta_i};
  const long long steps = std::llround(cfg_.duration_s / cfg_.step_s);
  const long long sample_every = std::llround(cfg_.sample_period_s / cfg_.step_s);
  const long long refresh_every =
      std::max<long long>(1, std::llround(cfg_.community_refresh_s / cfg_.step_s));

  log_event(0, "run_start",
            "\"policy\":\"" + to_string(cfg_.policy) + "\",\"scenario\":\"" +
                to_string(cfg_.scenario) + "\",\"seed\":" + std::to_string(cfg_.seed));
  sample(0.0);

  std::vector<Vec2> positions(world_.nodes.size());

  for (long long step = 1; step <= steps; ++step) {
    const double t = static_cast<double>(step) * cfg_.step_s;

    if (cfg_.dynamics.kind != DynamicsDescriptor::Kind::None) {
      const std::size_t channels_before = world_.catalog.channel_count();
      const std::size_t items_before = world_.catalog.size();
      apply_dynamics(world_, t, cfg_.dynamics, cfg_, rng_);
      if (world_.catalog.size() != items_before ||
          world_.catalog.channel_count() != channels_before)
        log_event(t, "dynamics",
                  "\"new_items\":" + std::to_string(world_.catalog.size() - items_before));
    }

    if (cfg_.ttl.enabled) expire_ttl(world_, t);

    mobility_->step(cfg_.step_s, rng_);
    for (NodeId n = 0; n < world_.nodes.size(); ++n) {
      positions[n] = mobility_->position(n);
      world_.nodes[n].position = positions[n];
    }

    if (cfg_.community_mode == CommunityMode::Activation && step % refresh_every == 0)
      refresh_groups(t);

    const ContactDelta delta = tracker_->update(positions);
    for (const auto& [ia, ib] : delta.started) {
      NodeState& a = world_.nodes[ia];
      NodeState& b = world_.nodes[ib];
      a.note_contact(b.id, t);
      b.note_contact(a.id, t);
      if (auto j = world_.groups[ia].group_of(b.id); j && *j > 0) ++group_contacts_[ia][*j];
      if (auto j = world_.groups[ib].group_of(a.id); j && *j > 0) ++group_contacts_[ib][*j];

      if (!exchange_gate(a, b, world_.groups[ia], world_.groups[ib], cfg_.selfish, rng_))
        continue;
      const ExchangeStats stats =
          handle_contact(a, b, world_.groups[ia], world_.groups[ib], world_.catalog, params, t,
                         rng_);
      overhead_.control += stats.control;
      overhead_.data += stats.data;
    }

    if (trace_) {
      for (NodeId n = 0; n < positions.size(); ++n)
        (*trace_) << t << ',' << n << ',' << positions[n].x << ',' << positions[n].y << '\n';
    }
    if (cfg_.debug_checks) check_invariants(t);
    if (step % sample_every == 0) sample(t);
  }

  log_event(cfg_.duration_s, "run_end",
            "\"overhead\":" + std::to_string(overhead_.total()));
  return series_;
}

}  // namespace oppsim

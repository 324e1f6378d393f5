#include <doctest.h>

#include <map>
#include <sstream>

#include "oppsim/engine.hpp"
#include "oppsim/metrics.hpp"

using namespace oppsim;

namespace {

SimConfig tiny_world(std::uint32_t communities = 2, std::uint32_t nodes = 4) {
  SimConfig cfg;
  cfg.communities = communities;
  cfg.nodes_per_community = nodes;
  cfg.channels = 2;
  cfg.items_per_channel = 5;
  cfg.duration_s = 1000;
  cfg.sample_period_s = 100;
  cfg.oc_capacity = 4;
  return cfg;
}

// Two nodes with self-only groups, ready for a direct handle_contact call.
struct ContactFixture {
  NodeState a, b;
  SocialGroups ga = SocialGroups::for_self(0);
  SocialGroups gb = SocialGroups::for_self(1);

  ContactFixture(std::uint32_t capacity = 4) {
    a.id = 0;
    b.id = 1;
    a.oc = OpportunisticCache(capacity);
    b.oc = OpportunisticCache(capacity);
  }
};

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("a control-only contact costs exactly two messages") {
  ContactFixture f;
  f.a.subscription = 0;
  f.b.subscription = 1;
  const PolicyParams params{Policy::RH, 1, 100};
  ItemCatalog catalog(2);
  Rng rng(1);
  const ExchangeStats stats =
      handle_contact(f.a, f.b, f.ga, f.gb, catalog, params, 5.0, rng);
  CHECK(stats.control == 2);
  CHECK(stats.data == 0);
  CHECK(stats.total() == 2);
  // Subscriber counters moved even though no item did.
  CHECK(f.a.recognition.channel_level(1) == 1);
  CHECK(f.b.recognition.channel_level(0) == 1);
  CHECK(f.a.peer_views.count(1) == 1);
}

TEST_CASE("fetched item copies are counted once each") {
  ContactFixture f;
  ItemCatalog catalog(1);
  const ItemId i0 = catalog.create(0, 0), i1 = catalog.create(0, 0), i2 = catalog.create(0, 0);
  f.a.subscription = 0;
  f.b.subscription = 0;
  f.b.li.insert(i0);
  f.b.li.insert(i1);
  f.b.li.insert(i2);
  f.b.delivered = {i0, i1, i2};
  const PolicyParams params{Policy::RH, 1, 100};
  Rng rng(1);
  const ExchangeStats stats =
      handle_contact(f.a, f.b, f.ga, f.gb, catalog, params, 5.0, rng);
  // a consumes and stores all three (one copy each); b fetches nothing.
  CHECK(stats.control == 2);
  CHECK(stats.data == 3);
  CHECK(f.a.delivered == std::set<ItemId>{i0, i1, i2});
  CHECK(f.a.oc.contents() == std::set<ItemId>{i0, i1, i2});
}

TEST_CASE("a subscribed item is consumed even when not stored") {
  ContactFixture f;
  ItemCatalog catalog(1);
  const ItemId item = catalog.create(0, 0);
  f.a.subscription = 0;
  f.b.subscription = 0;
  f.b.li.insert(item);
  // theta_i = 1: the sighting recorded at this contact already recognises
  // the item, so it is not kept.
  const PolicyParams params{Policy::RH, 1, 1};
  Rng rng(1);
  const ExchangeStats stats =
      handle_contact(f.a, f.b, f.ga, f.gb, catalog, params, 5.0, rng);
  CHECK(f.a.delivered.count(item) == 1);
  CHECK(f.a.oc.contents().empty());
  CHECK(stats.data == 1);  // the consumed copy still crossed the air
}

TEST_CASE("an item already held locally is not refetched") {
  ContactFixture f;
  ItemCatalog catalog(1);
  const ItemId item = catalog.create(0, 0);
  f.a.subscription = 0;
  f.b.subscription = 0;
  f.a.li.insert(item);
  f.a.delivered = {item};
  f.b.li.insert(item);
  f.b.delivered = {item};
  const PolicyParams params{Policy::RH, 1, 100};
  Rng rng(1);
  const ExchangeStats stats =
      handle_contact(f.a, f.b, f.ga, f.gb, catalog, params, 5.0, rng);
  CHECK(stats.data == 0);
  CHECK(stats.control == 2);
}

TEST_CASE("social acceptance follows 2^-rank of the side's preference order") {
  SocialGroups g = SocialGroups::for_self(0);
  g.add_group({1, 2});  // group 1
  g.add_group({3});     // group 2
  g.add_group({4});     // group 3
  const std::vector<std::uint64_t> contacts{0, 10, 5, 1};

  SUBCASE("direct: most-frequently-met group first") {
    CHECK(social_accept_probability(g, contacts, 1, 1.0, false) == doctest::Approx(1.0));
    CHECK(social_accept_probability(g, contacts, 3, 1.0, false) == doctest::Approx(0.5));
    CHECK(social_accept_probability(g, contacts, 4, 1.0, false) == doctest::Approx(0.25));
    CHECK(social_accept_probability(g, contacts, 4, 0.75, false) ==
          doctest::Approx(0.1875));  // rank 2 at p0 = 0.75
  }
  SUBCASE("inverse: least-frequently-met group first") {
    CHECK(social_accept_probability(g, contacts, 4, 1.0, true) == doctest::Approx(1.0));
    CHECK(social_accept_probability(g, contacts, 3, 1.0, true) == doctest::Approx(0.5));
    CHECK(social_accept_probability(g, contacts, 1, 1.0, true) == doctest::Approx(0.25));
  }
  SUBCASE("strangers rank last") {
    CHECK(social_accept_probability(g, contacts, 77, 1.0, false) == doctest::Approx(0.25));
  }
}

TEST_CASE("uniform gate proceeds at the joint probability") {
  ContactFixture f;
  SelfishnessDescriptor selfish;
  selfish.kind = SelfishnessDescriptor::Kind::Uniform;
  selfish.joint_p = 0.9;
  Rng rng(13);
  int proceed = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i)
    if (exchange_gate(f.a, f.b, f.ga, f.gb, selfish, rng)) ++proceed;
  CHECK(std::abs(proceed / double(trials) - 0.9) < 0.02);
}

TEST_CASE("a fully selfish network never exchanges") {
  SimConfig cfg = tiny_world();
  cfg.selfish.kind = SelfishnessDescriptor::Kind::Uniform;
  cfg.selfish.joint_p = 0.0;
  Simulation sim(cfg);
  const MetricsSeries series = sim.run();
  CHECK(series.final_overhead() == 0.0);
  CHECK(series.final_hit_rate() == doctest::Approx(series.samples.front().hit_rate));
  for (const NodeState& n : sim.world().nodes) CHECK(n.oc.contents().empty());
}

TEST_CASE("equivalent uniform probability follows the group-weighted mean") {
  const std::vector<double> sizes{10, 10, 5};
  const std::vector<double> probs{1.0, 0.5, 0.25};
  CHECK(equivalent_uniform_p(sizes, probs) == doctest::Approx(0.4225).epsilon(1e-12));

  const std::vector<double> ones{3, 7, 11};
  const std::vector<double> all_one{1.0, 1.0, 1.0};
  CHECK(equivalent_uniform_p(ones, all_one) == doctest::Approx(1.0));

  CHECK_THROWS_AS(equivalent_uniform_p({}, {}), ContractError);
  const std::vector<double> bad_sizes{1.0, 0.0};
  const std::vector<double> two{0.5, 0.5};
  CHECK_THROWS_AS(equivalent_uniform_p(bad_sizes, two), ContractError);
  const std::vector<double> one{0.5};
  CHECK_THROWS_AS(equivalent_uniform_p(bad_sizes, one), ContractError);
}

TEST_CASE("identical seeds reproduce the series bit for bit") {
  const SimConfig cfg = tiny_world();
  Simulation s1(cfg), s2(cfg);
  const MetricsSeries a = s1.run();
  const MetricsSeries b = s2.run();
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].hit_rate == b.samples[i].hit_rate);
    CHECK(a.samples[i].overhead_total == b.samples[i].overhead_total);
  }
  std::ostringstream ca, cb;
  write_csv(ca, a);
  write_csv(cb, b);
  CHECK(ca.str() == cb.str());
}

TEST_CASE("a zero-duration run yields the initial sample only") {
  SimConfig cfg = tiny_world();
  cfg.duration_s = 0;
  Simulation sim(cfg);
  const MetricsSeries series = sim.run();
  REQUIRE(series.samples.size() == 1);
  CHECK(series.samples[0].t == 0.0);
  CHECK(series.samples[0].hit_rate ==
        doctest::Approx(hit_rate(sim.world().nodes, sim.world().catalog)));
  CHECK(series.samples[0].overhead_total == 0.0);
}

TEST_CASE("a lone node keeps its initial hit rate and zero overhead") {
  SimConfig cfg;
  cfg.communities = 1;
  cfg.nodes_per_community = 1;
  cfg.channels = 2;
  cfg.items_per_channel = 5;
  cfg.duration_s = 500;
  cfg.sample_period_s = 100;
  Simulation sim(cfg);
  const MetricsSeries series = sim.run();
  CHECK(series.final_overhead() == 0.0);
  for (const MetricsSample& s : series.samples)
    CHECK(s.hit_rate == doctest::Approx(series.samples.front().hit_rate));
  // The only node generated everything, so its own channel is complete.
  CHECK(series.final_hit_rate() == doctest::Approx(1.0));
}

TEST_CASE("subscription split follows Zipf with largest remainder") {
  CHECK(subscription_split(25, 4, 1.0) == std::vector<std::uint32_t>{12, 6, 4, 3});
  const auto split = subscription_split(10, 3, 1.0);
  CHECK(split.size() == 3);
  CHECK(split[0] >= split[1]);
  CHECK(split[1] >= split[2]);
  CHECK(split[0] + split[1] + split[2] == 10);
}

TEST_CASE("rotated popularities give every channel the same subscriber total") {
  SimConfig cfg;  // standard 4 x 25
  Simulation sim(cfg);
  std::map<ChannelId, int> subscribers;
  for (const NodeState& n : sim.world().nodes) ++subscribers[n.subscription];
  REQUIRE(subscribers.size() == 4);
  for (const auto& [ch, count] : subscribers) CHECK(count == 25);
}

TEST_CASE("subscription rotation advances non-travellers and resets their counters") {
  SimConfig cfg = tiny_world();
  cfg.channels = 4;
  Simulation sim(cfg);
  World& world = sim.world();

  NodeState* traveller = nullptr;
  NodeState* resident = nullptr;
  for (NodeState& n : world.nodes) {
    if (n.traveller && !traveller) traveller = &n;
    if (!n.traveller && !resident) resident = &n;
  }
  REQUIRE(traveller);
  REQUIRE(resident);

  const ChannelId t_before = traveller->subscription;
  const ChannelId r_before = resident->subscription;
  const ChannelId r_after = (r_before + 1) % 4;

  // Seed a counter on an item of the channel the resident will move to.
  ItemId target_item = 0;
  for (const DataItem& item : world.catalog.items())
    if (item.channel == r_after) {
      target_item = item.id;
      break;
    }
  resident->recognition.record_contact(90, 99, {target_item});
  CHECK(resident->recognition.item_level(target_item) == 1);

  DynamicsDescriptor dyn;
  dyn.kind = DynamicsDescriptor::Kind::SubscriptionRotation;
  dyn.at_s = 100;
  Rng rng(1);
  apply_dynamics(world, 100, dyn, cfg, rng);

  CHECK(traveller->subscription == t_before);
  CHECK(resident->subscription == r_after);
  CHECK(resident->recognition.item_level(target_item) == 0);
  for (ItemId item : resident->delivered)
    CHECK(world.catalog.channel_of(item) == r_after);
  // Held items of the new channel count as consumed.
  for (ItemId item : resident->cache_summary())
    if (world.catalog.channel_of(item) == r_after) CHECK(resident->delivered.count(item) == 1);
}

TEST_CASE("the last channel rotates back to the first") {
  SimConfig cfg = tiny_world(1, 3);
  cfg.channels = 4;
  Simulation sim(cfg);
  World& world = sim.world();
  NodeState& n = world.nodes[1];  // non-traveller (single community has no travellers)
  n.subscription = 3;
  DynamicsDescriptor dyn;
  dyn.kind = DynamicsDescriptor::Kind::SubscriptionRotation;
  dyn.at_s = 100;
  Rng rng(1);
  apply_dynamics(world, 100, dyn, cfg, rng);
  CHECK(n.subscription == 0);
}

TEST_CASE("a new channel attracts the configured subscribers per community") {
  SimConfig cfg;  // standard 4 x 25
  cfg.dynamics.kind = DynamicsDescriptor::Kind::NewChannel;
  cfg.dynamics.at_s = 100;
  cfg.dynamics.items = 100;
  cfg.dynamics.subscribers_per_community = 15;
  Simulation sim(cfg);
  World& world = sim.world();

  // An old item with sightings: levels must survive the event.
  world.nodes[0].recognition.record_contact(90, 99, {0});

  Rng rng(7);
  apply_dynamics(world, 100, cfg.dynamics, cfg, rng);

  CHECK(world.catalog.channel_count() == 5);
  CHECK(world.catalog.channel_item_count(4) == 100);
  REQUIRE(world.hr_population.has_value());
  CHECK(world.hr_population->size() == 60);  // 15 x 4
  for (NodeId id : *world.hr_population) {
    CHECK_FALSE(world.nodes[id].traveller);
    CHECK(world.nodes[id].subscription == 4);
  }
  CHECK(world.nodes[0].recognition.item_level(0) == 1);
}

TEST_CASE("periodic injections fire at start and every period") {
  DynamicsDescriptor dyn;
  dyn.kind = DynamicsDescriptor::Kind::PeriodicInjection;
  dyn.at_s = 10000;
  dyn.period_s = 30000;
  dyn.items = 100;
  CHECK(dynamics_schedule(dyn, 100000) == std::vector<double>{10000, 40000, 70000});

  DynamicsDescriptor once;
  once.kind = DynamicsDescriptor::Kind::ItemDoubling;
  once.at_s = 10000;
  CHECK(dynamics_schedule(once, 50000) == std::vector<double>{10000});
}

TEST_CASE("item doubling dilutes the hit rate by exactly old/new per untouched node") {
  SimConfig cfg = tiny_world();
  cfg.channels = 1;
  cfg.items_per_channel = 10;
  Simulation sim(cfg);
  World& world = sim.world();

  std::map<NodeId, std::set<ItemId>> li_before, delivered_before;
  for (const NodeState& n : world.nodes) {
    li_before[n.id] = n.li.contents;
    delivered_before[n.id] = n.delivered;
  }
  const double old_count = world.catalog.channel_item_count(0);

  DynamicsDescriptor dyn;
  dyn.kind = DynamicsDescriptor::Kind::ItemDoubling;
  dyn.at_s = 500;
  Rng rng(3);
  apply_dynamics(world, 500, dyn, cfg, rng);
  const double new_count = world.catalog.channel_item_count(0);
  CHECK(new_count == 2 * old_count);

  for (const NodeState& n : world.nodes) {
    if (n.li.contents == li_before[n.id]) {
      // No new items landed here: the node's term shrank by old/new exactly.
      CHECK(n.delivered == delivered_before[n.id]);
      CHECK(n.delivered.size() / new_count ==
            doctest::Approx(delivered_before[n.id].size() / old_count * (old_count / new_count)));
    } else {
      for (ItemId item : n.delivered)
        CHECK((delivered_before[n.id].count(item) == 1 || n.li.contains(item)));
    }
  }
}

TEST_CASE("expired items vanish from every cache but stay consumed") {
  SimConfig cfg = tiny_world();
  Simulation sim(cfg);
  World& world = sim.world();

  const ItemId item = world.catalog.create(0, 0.0, 400.0);
  world.pending_expiry.insert({400.0, item});
  for (int i = 0; i < 5; ++i) {
    NodeState& n = world.nodes[i];
    if (i % 2 == 0)
      n.li.insert(item);
    else
      n.oc.replace({item});
    if (n.subscription == 0) n.delivered.insert(item);
  }

  expire_ttl(world, 399.0);
  CHECK(world.nodes[0].li.contains(item));  // not yet

  expire_ttl(world, 400.0);
  for (const NodeState& n : world.nodes) {
    CHECK_FALSE(n.li.contains(item));
    CHECK_FALSE(n.oc.contains(item));
  }
  bool still_delivered = false;
  for (const NodeState& n : world.nodes)
    if (n.delivered.count(item)) still_delivered = true;
  CHECK(still_delivered);
}

TEST_CASE("ttl lifetimes are clamped at the floor") {
  SimConfig cfg = tiny_world();
  cfg.ttl.enabled = true;
  cfg.ttl.mean_s = 100;  // far below sigma: raw samples often negative
  cfg.ttl.sigma_s = 1500;
  cfg.ttl.floor_s = 60;
  Simulation sim(cfg);
  for (const DataItem& item : sim.world().catalog.items()) {
    REQUIRE(item.expires_at.has_value());
    CHECK(*item.expires_at - item.created_at >= 60.0);
  }
}

TEST_CASE("gaussian lifetimes: about 95 percent within two sigma") {
  Rng rng(21);
  const int samples = 10000;
  int in_band = 0;
  for (int i = 0; i < samples; ++i) {
    const double v = rng.gaussian(10000, 1500);
    if (v >= 7000 && v <= 13000) ++in_band;
  }
  CHECK(in_band / double(samples) == doctest::Approx(0.9545).epsilon(0.015));
}

TEST_CASE("flooding bound: permissive settings deliver everything on a small world") {
  SimConfig cfg;
  cfg.scenario = Scenario::OT;
  cfg.communities = 2;
  cfg.nodes_per_community = 4;
  cfg.channels = 2;
  cfg.items_per_channel = 3;
  cfg.policy = Policy::RH;
  cfg.theta_c = 1;
  cfg.theta_i = 1000000000;
  cfg.oc_capacity = 6;  // the whole catalog fits
  cfg.duration_s = 20000;
  cfg.sample_period_s = 1000;
  Simulation sim(cfg);
  const MetricsSeries series = sim.run();
  CHECK(series.final_hit_rate() == doctest::Approx(1.0));
}

TEST_CASE("runtime invariant checks pass on a small run") {
  SimConfig cfg = tiny_world(2, 6);
  cfg.duration_s = 2000;
  cfg.debug_checks = true;
  cfg.ttl.enabled = true;
  cfg.ttl.mean_s = 800;
  Simulation sim(cfg);
  CHECK_NOTHROW(sim.run());
}

TEST_CASE("overhead counters never decrease") {
  SimConfig cfg = tiny_world(2, 6);
  cfg.duration_s = 3000;
  Simulation sim(cfg);
  const MetricsSeries series = sim.run();
  for (std::size_t i = 1; i < series.samples.size(); ++i) {
    CHECK(series.samples[i].overhead_total >= series.samples[i - 1].overhead_total);
    CHECK(series.samples[i].overhead_total ==
          series.samples[i].overhead_data + series.samples[i].overhead_control);
  }
}

TEST_CASE("hit rate is monotone in a static run without ttl") {
  SimConfig cfg = tiny_world(2, 6);
  cfg.duration_s = 3000;
  Simulation sim(cfg);
  const MetricsSeries series = sim.run();
  for (std::size_t i = 1; i < series.samples.size(); ++i)
    CHECK(series.samples[i].hit_rate >= series.samples[i - 1].hit_rate);
}

}  // TEST_SUITE

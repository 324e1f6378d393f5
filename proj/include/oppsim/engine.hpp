#ifndef OPPSIM_ENGINE_HPP
#define OPPSIM_ENGINE_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "oppsim/config.hpp"
#include "oppsim/metrics.hpp"
#include "oppsim/mobility.hpp"
#include "oppsim/node.hpp"
#include "oppsim/rng.hpp"
#include "oppsim/social.hpp"
#include "oppsim/types.hpp"

namespace oppsim {

/// Mutable simulation state shared by the engine operations.
struct World {
  ItemCatalog catalog;
  std::vector<NodeState> nodes;
  std::vector<SocialGroups> groups;  // parallel to nodes
  // Hit-rate population restriction (set by the new-channel event).
  std::optional<std::vector<NodeId>> hr_population;
  // (expires_at, item) of every item with a TTL, pending removal.
  std::multiset<std::pair<double, ItemId>> pending_expiry;
};

struct PolicyParams {
  Policy policy = Policy::SCH;
  std::uint32_t theta_c = 3;
  std::uint32_t theta_i = 3;
};

struct ExchangeStats {
  std::uint64_t control = 0;
  std::uint64_t data = 0;
  std::uint64_t total() const { return control + data; }
};

/// Full pairwise exchange at a contact start: summaries and recognition
/// vectors both ways, counter updates, consumption of subscribed items, and
/// the policy-driven cache replacement on both sides. Returns the message
/// cost (2 control + one data message per item copy actually fetched).
ExchangeStats handle_contact(NodeState& a, NodeState& b, const SocialGroups& ga,
                             const SocialGroups& gb, const ItemCatalog& catalog,
                             const PolicyParams& params, double t, Rng& rng);

/// Acceptance probability one side grants a peer under the social policy:
/// 2^-rank * p0, where rank orders that side's peer groups by how often
/// their members were met (descending for direct, ascending for inverse).
/// Strangers rank last.
double social_accept_probability(const SocialGroups& groups,
                                 std::span<const std::uint64_t> group_contacts, NodeId peer,
                                 double p0, bool inverse);

/// Contact counts per group index (index 0 unused), from a node's history.
std::vector<std::uint64_t> group_contact_totals(const SocialGroups& groups,
                                                const std::map<NodeId, std::uint32_t>& counts);

/// Whether a contact proceeds to an exchange. Both sides must accept;
/// a skipped contact costs nothing and changes nothing.
bool exchange_gate(const NodeState& a, const NodeState& b, const SocialGroups& ga,
                   const SocialGroups& gb, const SelfishnessDescriptor& selfish, Rng& rng);

/// Uniform exchange probability equivalent to a per-group assignment:
/// sqrt(p) = sum(n_k p_k) / sum(n_k), returns p.
double equivalent_uniform_p(std::span<const double> group_sizes,
                            std::span<const double> group_probs);

/// Applies every dynamics event scheduled exactly at time t (no-op
/// otherwise).
void apply_dynamics(World& world, double t, const DynamicsDescriptor& dyn, const SimConfig& cfg,
                    Rng& rng);

/// Removes every item whose TTL has passed from all caches. Consumed items
/// stay consumed.
void expire_ttl(World& world, double t);

/// Event times of a dynamics descriptor within (0, duration).
std::vector<double> dynamics_schedule(const DynamicsDescriptor& dyn, double duration);

/// One full simulation run.
class Simulation {
 public:
  explicit Simulation(SimConfig cfg);

  /// Runs to completion; deterministic for a fixed config (incl. seed).
  MetricsSeries run();

  const World& world() const { return world_; }
  World& world() { return world_; }

  /// Optional sinks, set before run().
  void set_event_log(std::ostream* out) { event_log_ = out; }
  void set_trace(std::ostream* out) { trace_ = out; }

 private:
  void build_world(Rng& rng);
  void refresh_groups(double now);
  void sample(double t);
  void check_invariants(double t) const;
  void log_event(double t, const std::string& kind, const std::string& detail);

  SimConfig cfg_;
  World world_;
  Rng rng_;
  std::optional<MobilityModel> mobility_;
  std::optional<ContactTracker> tracker_;
  // Per-node contact totals per group index, kept in step with groups.
  std::vector<std::vector<std::uint64_t>> group_contacts_;
  ExchangeStats overhead_;
  MetricsSeries series_;
  std::ostream* event_log_ = nullptr;
  std::ostream* trace_ = nullptr;
};

/// Subscriber counts per popularity rank for one community: Zipf(zipf_exp)
/// shares resolved to integers by largest remainder.
std::vector<std::uint32_t> subscription_split(std::uint32_t nodes, std::uint32_t channels,
                                              double zipf_exp);

}  // namespace oppsim

#endif  // OPPSIM_ENGINE_HPP

#ifndef OPPSIM_CONFIG_HPP
#define OPPSIM_CONFIG_HPP

#include <cstdint>
#include <string>

#include "oppsim/types.hpp"

namespace oppsim {

enum class Policy { RH, SCH };
enum class Scenario { OT, ZT, TT };
enum class CommunityMode { Oracle, Activation };
enum class PlacementMode { Uniform, Popularity, Inverse };

std::string to_string(Policy p);
std::string to_string(Scenario s);
Policy policy_from_string(const std::string& s);
Scenario scenario_from_string(const std::string& s);

/// Scheduled content/interest changes during a run.
struct DynamicsDescriptor {
  enum class Kind {
    None,
    SubscriptionRotation,  // every non-traveller advances one channel
    NewChannel,            // a fresh channel appears, some nodes re-subscribe
    ItemDoubling,          // every channel gets items_per_channel new items
    PeriodicInjection      // `items` new items per channel at start, start+period, ...
  };
  Kind kind = Kind::None;
  double at_s = 0.0;       // first (or only) event time
  double period_s = 0.0;   // PeriodicInjection only
  std::uint32_t items = 0;                      // NewChannel / PeriodicInjection
  std::uint32_t subscribers_per_community = 0;  // NewChannel only
};

/// Item lifetimes drawn from N(mean, sigma), clamped below at floor.
struct TtlDescriptor {
  bool enabled = false;
  double mean_s = 10000.0;
  double sigma_s = 1500.0;
  double floor_s = 60.0;
};

/// Partial participation in exchanges.
struct SelfishnessDescriptor {
  enum class Kind { None, Uniform, Social };
  Kind kind = Kind::None;
  double joint_p = 1.0;  // Uniform: pair-level exchange probability
  double p0 = 1.0;       // Social: acceptance for the preferred group
  bool inverse = false;  // Social: prefer the least-frequently-met group
};

/// Full description of one simulation run.
struct SimConfig {
  double area_width_m = 1000.0;
  double area_height_m = 1000.0;
  std::uint32_t grid_rows = 4;
  std::uint32_t grid_cols = 4;

  std::uint32_t channels = 4;
  std::uint32_t items_per_channel = 100;
  std::uint32_t communities = 4;
  std::uint32_t nodes_per_community = 25;

  double speed_min_mps = 1.0;
  double speed_max_mps = 1.86;
  double tx_range_m = 20.0;

  double duration_s = 50000.0;
  double step_s = 1.0;
  double sample_period_s = 500.0;

  std::uint32_t oc_capacity = 10;
  std::uint32_t theta_c = 3;  // channel recognition threshold
  std::uint32_t theta_i = 3;  // item recognition threshold (RT)

  Policy policy = Policy::SCH;
  Scenario scenario = Scenario::ZT;

  double stay_prob = 0.5;    // traveller keeps visiting after a movement
  double zipf_exp = 1.0;     // ZT destination skew (also channel popularity)
  PlacementMode placement = PlacementMode::Uniform;

  DynamicsDescriptor dynamics;
  TtlDescriptor ttl;
  SelfishnessDescriptor selfish;

  CommunityMode community_mode = CommunityMode::Oracle;
  double community_decay = 0.5;
  double community_gap_ratio = 2.0;
  double community_refresh_s = 1000.0;
  std::uint32_t community_max_groups = 8;

  std::uint64_t seed = 1;
  bool debug_checks = false;

  std::uint32_t node_count() const { return communities * nodes_per_community; }

  /// Throws ConfigError with a description of the first problem found.
  void validate() const;
};

}  // namespace oppsim

#endif  // OPPSIM_CONFIG_HPP

#include "oppsim/config.hpp"

#include <algorithm>
#include <cmath>

namespace oppsim {

std::string to_string(Policy p) { return p == Policy::RH ? "RH" : "SCH"; }

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::OT: return "OT";
    case Scenario::ZT: return "ZT";
    case Scenario::TT: return "TT";
  }
  return "?";
}

namespace {
std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}
}  // namespace

Policy policy_from_string(const std::string& s) {
  const std::string u = upper(s);
  if (u == "RH") return Policy::RH;
  if (u == "SCH") return Policy::SCH;
  throw ConfigError("unknown policy '" + s + "' (expected RH or SCH)");
}

Scenario scenario_from_string(const std::string& s) {
  const std::string u = upper(s);
  if (u == "OT") return Scenario::OT;
  if (u == "ZT") return Scenario::ZT;
  if (u == "TT") return Scenario::TT;
  throw ConfigError("unknown scenario '" + s + "' (expected OT, ZT or TT)");
}

namespace {
bool divides(double period, double total) {
  if (period <= 0) return false;
  const double q = total / period;
  return std::abs(q - std::round(q)) < 1e-9;
}
}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };

  if (area_width_m <= 0 || area_height_m <= 0) fail("area dimensions must be positive");
  if (grid_rows == 0 || grid_cols == 0) fail("grid dimensions must be positive");
  if (channels == 0) fail("channels must be positive");
  if (items_per_channel == 0) fail("items_per_channel must be positive");
  if (communities == 0) fail("communities must be positive");
  if (nodes_per_community == 0) fail("nodes_per_community must be positive");
  if (speed_min_mps <= 0 || speed_max_mps <= 0) fail("speeds must be positive");
  if (speed_min_mps > speed_max_mps) fail("speed range: min exceeds max");
  if (tx_range_m <= 0) fail("tx_range_m must be positive");
  if (duration_s < 0) fail("duration_s must be non-negative");
  if (step_s <= 0) fail("step_s must be positive");
  if (sample_period_s <= 0) fail("sample_period_s must be positive");
  if (duration_s > 0 && !divides(sample_period_s, duration_s))
    fail("sample_period_s must divide duration_s");
  if (duration_s > 0 && !divides(step_s, sample_period_s))
    fail("step_s must divide sample_period_s");
  if (theta_c < 1) fail("theta_c must be at least 1");
  if (theta_i < 1) fail("theta_i must be at least 1");
  if (stay_prob < 0 || stay_prob > 1) fail("stay_prob must be in [0,1]");
  if (zipf_exp < 0) fail("zipf_exp must be non-negative");

  // Travellers per community must leave at least one resident.
  if (communities > 1) {
    const std::uint32_t travellers = scenario == Scenario::TT ? communities - 1 : 1;
    if (travellers >= nodes_per_community)
      fail("nodes_per_community too small for the scenario's traveller count");
  }

  // Home cells: one per community, no two identical or edge-adjacent.
  const std::uint32_t cell_slots = ((grid_rows + 1) / 2) * ((grid_cols + 1) / 2);
  if (communities > cell_slots)
    fail("grid too small to place " + std::to_string(communities) +
         " non-adjacent home cells");

  switch (dynamics.kind) {
    case DynamicsDescriptor::Kind::None:
      break;
    case DynamicsDescriptor::Kind::PeriodicInjection:
      if (dynamics.period_s <= 0) fail("dynamics.period_s must be positive");
      if (dynamics.items == 0) fail("dynamics.items must be positive");
      [[fallthrough]];
    case DynamicsDescriptor::Kind::SubscriptionRotation:
    case DynamicsDescriptor::Kind::ItemDoubling:
      if (dynamics.at_s <= 0 || dynamics.at_s >= duration_s)
        fail("dynamics.at_s must lie inside (0, duration)");
      break;
    case DynamicsDescriptor::Kind::NewChannel:
      if (dynamics.at_s <= 0 || dynamics.at_s >= duration_s)
        fail("dynamics.at_s must lie inside (0, duration)");
      if (dynamics.items == 0) fail("dynamics.items must be positive");
      if (dynamics.subscribers_per_community == 0)
        fail("dynamics.subscribers_per_community must be positive");
      if (dynamics.subscribers_per_community > nodes_per_community)
        fail("dynamics.subscribers_per_community exceeds community size");
      break;
  }

  if (ttl.enabled) {
    if (ttl.mean_s <= 0) fail("ttl.mean_s must be positive");
    if (ttl.sigma_s < 0) fail("ttl.sigma_s must be non-negative");
    if (ttl.floor_s <= 0) fail("ttl.floor_s must be positive");
  }

  switch (selfish.kind) {
    case SelfishnessDescriptor::Kind::None:
      break;
    case SelfishnessDescriptor::Kind::Uniform:
      if (selfish.joint_p < 0 || selfish.joint_p > 1) fail("selfish.joint_p must be in [0,1]");
      break;
    case SelfishnessDescriptor::Kind::Social:
      if (selfish.p0 < 0 || selfish.p0 > 1) fail("selfish.p0 must be in [0,1]");
      break;
  }

  if (community_mode == CommunityMode::Activation) {
    if (community_decay <= 0) fail("community.decay must be positive");
    if (community_gap_ratio <= 0) fail("community.gap_ratio must be positive");
    if (community_refresh_s <= 0) fail("community.refresh_period_s must be positive");
    if (community_max_groups == 0) fail("community.max_groups must be positive");
  }
}

}  // namespace oppsim

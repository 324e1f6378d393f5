#ifndef OPPSIM_MOBILITY_HPP
#define OPPSIM_MOBILITY_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oppsim/config.hpp"
#include "oppsim/rng.hpp"
#include "oppsim/types.hpp"

namespace oppsim {

struct CellRect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool contains(const Vec2& p, double eps = 1e-9) const {
    return p.x >= x0 - eps && p.x <= x1 + eps && p.y >= y0 - eps && p.y <= y1 + eps;
  }
  Vec2 center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
};

struct Waypoint {
  Vec2 destination;
  double speed = 0.0;
};

/// Uniform destination inside the cell, uniform speed in [min, max].
Waypoint next_waypoint(const CellRect& cell, double speed_min, double speed_max, Rng& rng);

/// Moves pos along the segment toward target by speed*dt. Arrival clamps to
/// the target exactly (leftover time is not carried over); returns whether
/// the target was reached.
bool advance_position(Vec2& pos, const Vec2& target, double speed, double dt);

/// Where each community lives and how its travellers roam.
class ScenarioWiring {
 public:
  ScenarioWiring(Scenario scenario, std::uint32_t communities, double zipf_exp);

  static std::uint32_t travellers_per_community(Scenario scenario, std::uint32_t communities);

  /// Destination community when a traveller leaves home.
  /// traveller_index distinguishes the multiple travellers of one community
  /// (fixed distinct targets when each bridges a single community).
  CommunityId pick_destination(CommunityId home, std::uint32_t traveller_index, Rng& rng) const;

  /// Other communities in descending connection strength from `home`
  /// (visit preference for single-traveller scenarios, fixed order otherwise).
  std::vector<CommunityId> preference_order(CommunityId home) const;

  Scenario scenario() const { return scenario_; }

 private:
  Scenario scenario_;
  std::uint32_t communities_;
  std::vector<double> zipf_cdf_;  // over preference ranks 1..C-1
};

struct TravellerDecision {
  enum class Kind { Stay, GoHome, Visit };
  Kind kind = Kind::Stay;
  CommunityId destination = 0;  // Visit only
};

/// Decision a traveller takes after completing a movement: while abroad,
/// keep visiting with probability stay_prob, otherwise head home; at home,
/// pick the next community to visit by the scenario rule.
TravellerDecision traveller_decision(CommunityId home, std::optional<CommunityId> visiting,
                                     std::uint32_t traveller_index, const ScenarioWiring& wiring,
                                     double stay_prob, Rng& rng);

/// Grid world with one home cell per community, random waypoints inside
/// cells and straight-line transit between cells for travellers.
class MobilityModel {
 public:
  MobilityModel(const SimConfig& cfg, Rng& rng);

  /// Advance every node by dt seconds, selecting new waypoints on arrival.
  void step(double dt, Rng& rng);

  std::size_t node_count() const { return nodes_.size(); }
  const Vec2& position(NodeId n) const { return nodes_[n].pos; }
  CommunityId community_of(NodeId n) const { return nodes_[n].home; }
  bool is_traveller(NodeId n) const { return nodes_[n].traveller_index.has_value(); }
  /// Community a traveller is currently visiting or in transit to; nullopt
  /// when home-bound or a non-traveller.
  std::optional<CommunityId> visiting(NodeId n) const { return nodes_[n].visiting; }

  const CellRect& home_cell(CommunityId c) const { return home_cells_.at(c); }
  const ScenarioWiring& wiring() const { return wiring_; }

  /// Home cells on the grid, pairwise non-identical and non-edge-adjacent.
  static std::vector<std::pair<std::uint32_t, std::uint32_t>> place_home_cells(
      std::uint32_t rows, std::uint32_t cols, std::uint32_t communities);

 private:
  struct NodeMotion {
    CommunityId home = 0;
    std::optional<std::uint32_t> traveller_index;
    Vec2 pos;
    Vec2 target;
    double speed = 0.0;
    std::optional<CommunityId> visiting;  // set while abroad or in transit out
    bool in_transit = false;
  };

  void arrive(NodeMotion& n, Rng& rng);
  const CellRect& current_cell(const NodeMotion& n) const;

  ScenarioWiring wiring_;
  std::vector<CellRect> home_cells_;
  std::vector<NodeMotion> nodes_;
  double speed_min_, speed_max_, stay_prob_;
};

struct ContactDelta {
  std::vector<std::pair<NodeId, NodeId>> started;  // a < b
  std::vector<std::pair<NodeId, NodeId>> ended;
};

/// Edge-triggered range-based contact detection over all pairs.
class ContactTracker {
 public:
  ContactTracker(std::size_t nodes, double range);

  /// Positions indexed by node id; returns transitions since the last call.
  ContactDelta update(const std::vector<Vec2>& positions);

  bool in_contact(NodeId a, NodeId b) const;

 private:
  std::size_t pair_index(NodeId a, NodeId b) const;

  std::size_t n_;
  double range_sq_;
  std::vector<bool> in_contact_;
};

}  // namespace oppsim

#endif  // OPPSIM_MOBILITY_HPP

#include "oppsim/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace oppsim {

Waypoint next_waypoint(const CellRect& cell, double speed_min, double speed_max, Rng& rng) {
  Waypoint w;
  w.destination.x = rng.uniform(cell.x0, cell.x1);
  w.destination.y = rng.uniform(cell.y0, cell.y1);
  w.speed = rng.uniform(speed_min, speed_max);
  return w;
}

std::uint32_t ScenarioWiring::travellers_per_community(Scenario scenario,
                                                       std::uint32_t communities) {
  if (communities <= 1) return 0;
  return scenario == Scenario::TT ? communities - 1 : 1;
}

ScenarioWiring::ScenarioWiring(Scenario scenario, std::uint32_t communities, double zipf_exp)
    : scenario_(scenario), communities_(communities) {
  if (scenario_ == Scenario::ZT && communities_ > 1) {
    // Cumulative Zipf weights over the C-1 preference ranks.
    double total = 0.0;
    for (std::uint32_t r = 1; r < communities_; ++r) total += std::pow(r, -zipf_exp);
    double acc = 0.0;
    for (std::uint32_t r = 1; r < communities_; ++r) {
      acc += std::pow(r, -zipf_exp) / total;
      zipf_cdf_.push_back(acc);
    }
    zipf_cdf_.back() = 1.0;
  }
}

std::vector<CommunityId> ScenarioWiring::preference_order(CommunityId home) const {
  std::vector<CommunityId> order;
  for (std::uint32_t k = 1; k < communities_; ++k)
    order.push_back((home + k) % communities_);
  if (scenario_ == Scenario::TT) std::sort(order.begin(), order.end());
  return order;
}

CommunityId ScenarioWiring::pick_destination(CommunityId home, std::uint32_t traveller_index,
                                             Rng& rng) const {
  if (communities_ <= 1) throw ContractError("pick_destination: single community");
  switch (scenario_) {
    case Scenario::OT:
      return (home + 1) % communities_;
    case Scenario::TT:
      // One fixed bridge per traveller.
      return (home + 1 + traveller_index % (communities_ - 1)) % communities_;
    case Scenario::ZT: {
      const double u = rng.uniform();
      std::size_t rank = 0;
      while (rank + 1 < zipf_cdf_.size() && u >= zipf_cdf_[rank]) ++rank;
      return (home + 1 + static_cast<std::uint32_t>(rank)) % communities_;
    }
  }
  throw ContractError("pick_destination: unreachable");
}

TravellerDecision traveller_decision(CommunityId home, std::optional<CommunityId> visiting,
                                     std::uint32_t traveller_index, const ScenarioWiring& wiring,
                                     double stay_prob, Rng& rng) {
  if (visiting) {
    if (rng.bernoulli(stay_prob)) return {TravellerDecision::Kind::Stay, *visiting};
    return {TravellerDecision::Kind::GoHome, home};
  }
  return {TravellerDecision::Kind::Visit, wiring.pick_destination(home, traveller_index, rng)};
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> MobilityModel::place_home_cells(
    std::uint32_t rows, std::uint32_t cols, std::uint32_t communities) {
  // Every second row/column: cells can't be identical or share an edge.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> cells;
  for (std::uint32_t r = 0; r < rows && cells.size() < communities; r += 2)
    for (std::uint32_t c = 0; c < cols && cells.size() < communities; c += 2)
      cells.emplace_back(r, c);
  if (cells.size() < communities)
    throw ConfigError("grid too small for non-adjacent home cells");
  return cells;
}

MobilityModel::MobilityModel(const SimConfig& cfg, Rng& rng)
    : wiring_(cfg.scenario, cfg.communities, cfg.zipf_exp),
      speed_min_(cfg.speed_min_mps),
      speed_max_(cfg.speed_max_mps),
      stay_prob_(cfg.stay_prob) {
  const double cell_w = cfg.area_width_m / cfg.grid_cols;
  const double cell_h = cfg.area_height_m / cfg.grid_rows;
  for (auto [row, col] : place_home_cells(cfg.grid_rows, cfg.grid_cols, cfg.communities)) {
    CellRect cell;
    cell.x0 = col * cell_w;
    cell.y0 = row * cell_h;
    cell.x1 = cell.x0 + cell_w;
    cell.y1 = cell.y0 + cell_h;
    home_cells_.push_back(cell);
  }

  const std::uint32_t travellers =
      ScenarioWiring::travellers_per_community(cfg.scenario, cfg.communities);
  nodes_.resize(cfg.node_count());
  for (NodeId n = 0; n < nodes_.size(); ++n) {
    NodeMotion& m = nodes_[n];
    m.home = n / cfg.nodes_per_community;
    const std::uint32_t slot = n % cfg.nodes_per_community;
    if (slot < travellers) m.traveller_index = slot;
    const CellRect& cell = home_cells_[m.home];
    m.pos.x = rng.uniform(cell.x0, cell.x1);
    m.pos.y = rng.uniform(cell.y0, cell.y1);
    const Waypoint w = next_waypoint(cell, speed_min_, speed_max_, rng);
    m.target = w.destination;
    m.speed = w.speed;
  }
}

const CellRect& MobilityModel::current_cell(const NodeMotion& n) const {
  return home_cells_[n.visiting ? *n.visiting : n.home];
}

void MobilityModel::arrive(NodeMotion& n, Rng& rng) {
  if (!n.traveller_index) {
    const Waypoint w = next_waypoint(home_cells_[n.home], speed_min_, speed_max_, rng);
    n.target = w.destination;
    n.speed = w.speed;
    return;
  }

  if (n.in_transit) n.in_transit = false;  // reached the destination cell

  const TravellerDecision d =
      traveller_decision(n.home, n.visiting, *n.traveller_index, wiring_, stay_prob_, rng);
  switch (d.kind) {
    case TravellerDecision::Kind::Stay: {
      const Waypoint w = next_waypoint(current_cell(n), speed_min_, speed_max_, rng);
      n.target = w.destination;
      n.speed = w.speed;
      break;
    }
    case TravellerDecision::Kind::GoHome: {
      n.visiting.reset();
      n.in_transit = true;
      const Waypoint w = next_waypoint(home_cells_[n.home], speed_min_, speed_max_, rng);
      n.target = w.destination;
      n.speed = w.speed;
      break;
    }
    case TravellerDecision::Kind::Visit: {
      n.visiting = d.destination;
      n.in_transit = true;
      const Waypoint w = next_waypoint(home_cells_[d.destination], speed_min_, speed_max_, rng);
      n.target = w.destination;
      n.speed = w.speed;
      break;
    }
  }
}

bool advance_position(Vec2& pos, const Vec2& target, double speed, double dt) {
  const double dx = target.x - pos.x;
  const double dy = target.y - pos.y;
  const double dist = std::hypot(dx, dy);
  const double reach = speed * dt;
  if (dist <= reach) {
    pos = target;
    return true;
  }
  pos.x += dx / dist * reach;
  pos.y += dy / dist * reach;
  return false;
}

void MobilityModel::step(double dt, Rng& rng) {
  for (NodeMotion& n : nodes_) {
    if (advance_position(n.pos, n.target, n.speed, dt)) arrive(n, rng);
  }
}

ContactTracker::ContactTracker(std::size_t nodes, double range)
    : n_(nodes), range_sq_(range * range), in_contact_(nodes * (nodes ? nodes - 1 : 0) / 2, false) {}

std::size_t ContactTracker::pair_index(NodeId a, NodeId b) const {
  // a < b required; triangular packing.
  return static_cast<std::size_t>(a) * (2 * n_ - a - 1) / 2 + (b - a - 1);
}

bool ContactTracker::in_contact(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  return in_contact_[pair_index(a, b)];
}

ContactDelta ContactTracker::update(const std::vector<Vec2>& positions) {
  ContactDelta delta;
  for (NodeId a = 0; a + 1 < n_; ++a) {
    for (NodeId b = a + 1; b < n_; ++b) {
      const double dx = positions[a].x - positions[b].x;
      const double dy = positions[a].y - positions[b].y;
      const bool now = dx * dx + dy * dy <= range_sq_;
      const std::size_t idx = pair_index(a, b);
      if (now && !in_contact_[idx]) delta.started.emplace_back(a, b);
      if (!now && in_contact_[idx]) delta.ended.emplace_back(a, b);
      in_contact_[idx] = now;
    }
  }
  return delta;
}

}  // namespace oppsim

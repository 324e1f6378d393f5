#ifndef OPPSIM_METRICS_HPP
#define OPPSIM_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oppsim/node.hpp"
#include "oppsim/types.hpp"

namespace oppsim {

struct MetricsSample {
  double t = 0.0;
  double hit_rate = 0.0;
  double overhead_total = 0.0;
  double overhead_data = 0.0;
  double overhead_control = 0.0;
};

/// Time series of one run (or the pointwise mean of several runs).
struct MetricsSeries {
  std::vector<MetricsSample> samples;

  // run metadata
  std::string scenario;
  std::string policy;
  std::uint32_t rt = 0;
  std::uint64_t seed = 0;
  std::string population = "all";  // or "resubscribed"
  std::uint32_t averaged_over = 1;

  const MetricsSample& final_sample() const { return samples.back(); }
  double final_hit_rate() const { return samples.back().hit_rate; }
  double final_overhead() const { return samples.back().overhead_total; }

  /// Linear interpolation is never used: returns the last sample at or
  /// before t. Throws if t precedes the first sample.
  const MetricsSample& at_or_before(double t) const;
};

/// Mean over nodes of the delivered fraction of each node's subscribed
/// channel. Nodes whose channel has no items contribute 0. `population`
/// restricts the mean to the given node ids (empty optional = all nodes).
double hit_rate(const std::vector<NodeState>& nodes, const ItemCatalog& catalog,
                const std::optional<std::vector<NodeId>>& population = std::nullopt);

/// Pointwise mean of several runs; every series must share the same
/// sampling instants.
MetricsSeries average_runs(const std::vector<MetricsSeries>& runs);

/// CSV with header t,hit_rate,overhead_total,overhead_data,overhead_control.
/// Fixed formats so identical runs serialize byte-identically.
void write_csv(std::ostream& out, const MetricsSeries& series);

/// Same data, space-separated without header (gnuplot-friendly).
void write_dat(std::ostream& out, const MetricsSeries& series);

/// scenario/policy/RT/seed embedded: e.g. "zt_sch_rt3_seed4.csv".
std::string csv_filename(const MetricsSeries& series, bool averaged);

}  // namespace oppsim

#endif  // OPPSIM_METRICS_HPP

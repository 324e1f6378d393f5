#include "oppsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace oppsim {

const MetricsSample& MetricsSeries::at_or_before(double t) const {
  if (samples.empty() || samples.front().t > t)
    throw ContractError("MetricsSeries::at_or_before: no sample at or before t");
  const MetricsSample* best = &samples.front();
  for (const MetricsSample& s : samples) {
    if (s.t > t) break;
    best = &s;
  }
  return *best;
}

double hit_rate(const std::vector<NodeState>& nodes, const ItemCatalog& catalog,
                const std::optional<std::vector<NodeId>>& population) {
  double sum = 0.0;
  std::size_t count = 0;
  auto term = [&](const NodeState& n) {
    const std::uint32_t total = catalog.channel_item_count(n.subscription);
    sum += total == 0 ? 0.0 : static_cast<double>(n.delivered.size()) / total;
    ++count;
  };
  if (population) {
    for (NodeId id : *population) term(nodes.at(id));
  } else {
    for (const NodeState& n : nodes) term(n);
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

MetricsSeries average_runs(const std::vector<MetricsSeries>& runs) {
  if (runs.empty()) throw ContractError("average_runs: no runs");
  const std::size_t n = runs.front().samples.size();
  for (const MetricsSeries& r : runs) {
    if (r.samples.size() != n)
      throw ContractError("average_runs: sample counts differ");
    for (std::size_t i = 0; i < n; ++i)
      if (r.samples[i].t != runs.front().samples[i].t)
        throw ContractError("average_runs: sampling instants differ");
  }

  MetricsSeries mean = runs.front();
  mean.seed = 0;
  mean.averaged_over = static_cast<std::uint32_t>(runs.size());
  for (std::size_t i = 0; i < n; ++i) {
    double hr = 0, tot = 0, data = 0, ctl = 0;
    for (const MetricsSeries& r : runs) {
      hr += r.samples[i].hit_rate;
      tot += r.samples[i].overhead_total;
      data += r.samples[i].overhead_data;
      ctl += r.samples[i].overhead_control;
    }
    const double k = static_cast<double>(runs.size());
    mean.samples[i] = {runs.front().samples[i].t, hr / k, tot / k, data / k, ctl / k};
  }
  return mean;
}

namespace {
std::string format_sample(const MetricsSample& s, char sep) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.0f%c%.6f%c%.3f%c%.3f%c%.3f", s.t, sep, s.hit_rate, sep,
                s.overhead_total, sep, s.overhead_data, sep, s.overhead_control);
  return buf;
}
}  // namespace

void write_csv(std::ostream& out, const MetricsSeries& series) {
  out << "t,hit_rate,overhead_total,overhead_data,overhead_control\n";
  for (const MetricsSample& s : series.samples) out << format_sample(s, ',') << '\n';
}

void write_dat(std::ostream& out, const MetricsSeries& series) {
  for (const MetricsSample& s : series.samples) out << format_sample(s, ' ') << '\n';
}

std::string csv_filename(const MetricsSeries& series, bool averaged) {
  std::ostringstream name;
  std::string scen = series.scenario, pol = series.policy;
  std::transform(scen.begin(), scen.end(), scen.begin(), ::tolower);
  std::transform(pol.begin(), pol.end(), pol.begin(), ::tolower);
  name << scen << '_' << pol << "_rt" << series.rt;
  if (averaged)
    name << "_avg";
  else
    name << "_seed" << series.seed;
  name << ".csv";
  return name.str();
}

}  // namespace oppsim

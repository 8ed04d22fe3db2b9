#include "mbp/interference.hpp"

#include <algorithm>
#include <complex>

#include "mbp/error.hpp"

namespace mbp {

namespace {

double power_share(const NetworkGraph& g, NodeId tx, ConstraintModel model) {
  return model == ConstraintModel::kMuMimo ? 1.0 / static_cast<double>(g.adjacency[tx].size())
                                           : 1.0;
}

// |w_r^H H w_t|^2 * g^2
double leak(const ComplexVector& w_r, const LinkChannel& via, const ComplexVector& w_t) {
  const Complex c = w_r.dot(via.fading * w_t);
  const double amp = via.pathloss_amplitude();
  return std::norm(c) * amp * amp;
}

}  // namespace

std::vector<double> interference_power_diagnostic(const NetworkGraph& g, const Schedule& s,
                                                  ConstraintModel model) {
  // R(n): active receivers per transmitter; T(m): active transmitters per receiver.
  std::vector<std::vector<int>> tx_streams(g.node_count()), rx_streams(g.node_count());
  for (int li : s.active_links) {
    const Link& l = g.links[li];
    if (l.channel.fading.size() == 0) {
      throw InputError("interference diagnostic needs fading matrices; link " +
                       std::to_string(l.tx) + "->" + std::to_string(l.rx) + " has none");
    }
    tx_streams[l.tx].push_back(li);
    rx_streams[l.rx].push_back(li);
  }

  std::vector<double> out;
  out.reserve(s.active_links.size());
  for (int li : s.active_links) {
    const Link& l = g.links[li];
    const NodeId n = l.tx;
    const NodeId m = l.rx;
    const ComplexVector& w_r = l.channel.rx_beam;
    double total = 0.0;

    for (int lj : tx_streams[n]) {
      if (lj == li) continue;
      const double p = power_share(g, n, model) * g.nodes[n].radio.tx_power_watts();
      total += p * leak(w_r, l.channel, g.links[lj].channel.tx_beam);
    }

    for (int lk : rx_streams[m]) {
      if (lk == li) continue;
      const Link& other = g.links[lk];
      const NodeId i = other.tx;
      const double p_i = power_share(g, i, model) * g.nodes[i].radio.tx_power_watts();
      total += p_i * leak(w_r, other.channel, other.channel.tx_beam);
      for (int lj : tx_streams[i]) {
        const NodeId j = g.links[lj].rx;
        if (j == m || j == n) continue;
        total += p_i * leak(w_r, other.channel, g.links[lj].channel.tx_beam);
      }
    }
    out.push_back(total);
  }
  return out;
}

InterferenceReport interference_report(const NetworkGraph& g, const Schedule& s,
                                       ConstraintModel model, const ChannelParams& params) {
  const std::vector<double> power = interference_power_diagnostic(g, s, model);
  InterferenceReport r;
  r.ratio.reserve(power.size());
  for (std::size_t i = 0; i < power.size(); ++i) {
    const Link& l = g.links[s.active_links[i]];
    const double noise = params.bandwidth_hz * noise_density_w_per_hz(params, g.nodes[l.rx].radio);
    r.ratio.push_back(power[i] / noise);
  }
  if (!r.ratio.empty()) {
    std::vector<double> sorted = r.ratio;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = sorted.size();
    r.median_ratio = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
    r.max_ratio = sorted.back();
  }
  return r;
}

}  // namespace mbp

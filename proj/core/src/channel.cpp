#include "mbp/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "mbp/error.hpp"

namespace mbp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

int perfect_square_side(int n) {
  if (n < 1) return -1;
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return side * side == n ? side : -1;
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

constexpr int kMaxPowerIterations = 20000;
constexpr double kPowerIterationTol = 1e-9;

// One power-iteration pass from `v`. Returns true on convergence.
bool power_iterate(const ComplexMatrix& h, ComplexVector& v, double& mu, int& iterations) {
  ComplexVector hv(h.rows());
  ComplexVector next(h.cols());
  for (int it = 0; it < kMaxPowerIterations; ++it) {
    ++iterations;
    hv.noalias() = h * v;
    mu = hv.squaredNorm();
    if (mu == 0.0) return false;
    next.noalias() = h.adjoint() * hv;
    const double residual = (next - mu * v).norm();
    v = next / next.norm();
    if (residual <= kPowerIterationTol * mu) {
      hv.noalias() = h * v;
      mu = hv.squaredNorm();
      return true;
    }
  }
  return false;
}

}  // namespace

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::kBaseStation: return "BS";
    case NodeClass::kRelay: return "RN";
    case NodeClass::kUserEquipment: return "UE";
  }
  return "?";
}

NodeClass node_class_from_string(const char* s) {
  if (std::strcmp(s, "BS") == 0) return NodeClass::kBaseStation;
  if (std::strcmp(s, "RN") == 0) return NodeClass::kRelay;
  if (std::strcmp(s, "UE") == 0) return NodeClass::kUserEquipment;
  throw InputError(std::string("unknown node class '") + s + "'");
}

const char* to_string(LinkState s) {
  switch (s) {
    case LinkState::kOutage: return "OUT";
    case LinkState::kLineOfSight: return "LOS";
    case LinkState::kNonLineOfSight: return "NLOS";
  }
  return "?";
}

double RadioProfile::tx_power_watts() const { return db_to_linear(tx_power_dbm - 30.0); }

void RadioProfile::validate() const {
  if (array_side < 1) throw InputError("array_side must be >= 1");
  if (!std::isfinite(tx_power_dbm)) throw InputError("tx_power_dbm must be finite");
  if (!std::isfinite(noise_figure_db)) throw InputError("noise_figure_db must be finite");
}

RadioProfile RadioProfile::defaults(NodeClass c) {
  switch (c) {
    case NodeClass::kBaseStation: return {c, 30.0, 5.0, 8};
    case NodeClass::kRelay: return {c, 25.0, 6.0, 6};
    case NodeClass::kUserEquipment: return {c, 20.0, 7.0, 4};
  }
  throw InputError("unknown node class");
}

void ChannelParams::validate() const {
  if (!(bandwidth_hz > 0.0)) throw InputError("bandwidth_hz must be > 0");
  if (!(frame_s > 0.0)) throw InputError("frame_s must be > 0");
  if (paths_per_cluster < 1) throw InputError("paths_per_cluster must be >= 1");
  if (!(cluster_rate >= 0.0)) throw InputError("cluster_rate must be >= 0");
  if (!(angular_spread_mean_deg >= 0.0)) throw InputError("angular_spread_mean_deg must be >= 0");
}

double LinkChannel::pathloss_amplitude() const {
  if (!std::isfinite(pathloss_db)) return 0.0;
  return std::pow(10.0, -pathloss_db / 20.0);
}

double outage_probability(double distance_m) {
  return 1.0 - std::min(1.0, std::exp(5.2 - 0.0334 * distance_m));
}

double los_probability(double distance_m) {
  return (1.0 - outage_probability(distance_m)) * std::exp(-0.0149 * distance_m);
}

double nlos_probability(double distance_m) {
  return std::max(0.0, 1.0 - outage_probability(distance_m) - los_probability(distance_m));
}

LinkState sample_link_state(double distance_m, RandomStream& rng) {
  if (!(distance_m > 0.0)) throw InputError("link distance must be positive");
  const double p_out = outage_probability(distance_m);
  const double p_los = los_probability(distance_m);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < p_out) return LinkState::kOutage;
  if (u < p_out + p_los) return LinkState::kLineOfSight;
  return LinkState::kNonLineOfSight;
}

double median_pathloss_db(LinkState state, double distance_m) {
  switch (state) {
    case LinkState::kOutage: return std::numeric_limits<double>::infinity();
    case LinkState::kLineOfSight: return 61.4 + 20.0 * std::log10(distance_m);
    case LinkState::kNonLineOfSight: return 72.0 + 29.2 * std::log10(distance_m);
  }
  return std::numeric_limits<double>::infinity();
}

double shadowing_sigma_db(LinkState state) {
  switch (state) {
    case LinkState::kLineOfSight: return 5.8;
    case LinkState::kNonLineOfSight: return 8.7;
    case LinkState::kOutage: return 0.0;
  }
  return 0.0;
}

double sample_pathloss_db(LinkState state, double distance_m, RandomStream& rng) {
  if (state == LinkState::kOutage) return std::numeric_limits<double>::infinity();
  const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
  return median_pathloss_db(state, distance_m) + shadowing_sigma_db(state) * z;
}

ComplexVector ula_signature(int n, double angle_rad) {
  ComplexVector a(n);
  const double phase = -std::numbers::pi * std::sin(angle_rad);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) a(k) = std::polar(scale, phase * k);
  return a;
}

ComplexVector upa_signature(int side, double azimuth_rad, double elevation_rad) {
  const ComplexVector az = ula_signature(side, azimuth_rad);
  const ComplexVector el = ula_signature(side, elevation_rad);
  ComplexVector out(side * side);
  for (int i = 0; i < side; ++i) {
    out.segment(i * side, side) = az(i) * el;
  }
  return out;
}

ComplexMatrix sample_fading_matrix(int n_rx, int n_tx, const ChannelParams& params,
                                   RandomStream& rng) {
  const int side_rx = perfect_square_side(n_rx);
  const int side_tx = perfect_square_side(n_tx);
  if (side_rx < 0 || side_tx < 0) {
    throw InputError("antenna counts must be perfect squares, got " + std::to_string(n_rx) +
                     "x" + std::to_string(n_tx));
  }

  std::uniform_real_distribution<double> azimuth(0.0, kTwoPi);
  std::uniform_real_distribution<double> elevation(-std::numbers::pi / 2, std::numbers::pi / 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double spread_mean_rad = params.angular_spread_mean_deg * std::numbers::pi / 180.0;

  const int clusters =
      std::max(1, std::poisson_distribution<int>(params.cluster_rate)(rng));
  const int paths = params.paths_per_cluster;

  ComplexMatrix h = ComplexMatrix::Zero(n_rx, n_tx);
  for (int k = 0; k < clusters; ++k) {
    const double rx_az = azimuth(rng);
    const double tx_az = azimuth(rng);
    const double rx_el = elevation(rng);
    const double tx_el = elevation(rng);
    double rms = 0.0;
    if (spread_mean_rad > 0.0) {
      rms = std::exponential_distribution<double>(1.0 / spread_mean_rad)(rng);
    }
    for (int l = 0; l < paths; ++l) {
      const double r_az = wrap_angle(rx_az + rms * normal(rng));
      const double r_el = wrap_angle(rx_el + rms * normal(rng));
      const double t_az = wrap_angle(tx_az + rms * normal(rng));
      const double t_el = wrap_angle(tx_el + rms * normal(rng));
      const double re = normal(rng) * std::numbers::sqrt2 / 2.0;
      const double im = normal(rng) * std::numbers::sqrt2 / 2.0;
      const Complex gain(re, im);
      const ComplexVector a_r = upa_signature(side_rx, r_az, r_el);
      const ComplexVector a_t = upa_signature(side_tx, t_az, t_el);
      h.noalias() += gain * a_r * a_t.transpose();
    }
  }
  const double l = static_cast<double>(clusters * paths);
  if (params.fading_scale == FadingScale::kArrayGain) {
    h *= std::sqrt(static_cast<double>(n_rx) * static_cast<double>(n_tx) / l);
  } else {
    h /= l;
  }
  return h;
}

double expected_fading_energy(int n_rx, int n_tx, const ChannelParams& params) {
  if (params.fading_scale == FadingScale::kArrayGain) {
    return static_cast<double>(n_rx) * static_cast<double>(n_tx);
  }
  // Sum over the clamped Poisson law of P(N_c = k) / (k * N_p).
  const double mean = params.cluster_rate;
  const double np = params.paths_per_cluster;
  double pmf = std::exp(-mean);  // P(0)
  double total = pmf / np;       // N_c = 0 is clamped to 1
  for (int k = 1; k < 200; ++k) {
    pmf *= mean / k;
    total += pmf / (k * np);
    if (pmf < 1e-300) break;
  }
  return total;
}

BeamformResult beamform_gain(const ComplexMatrix& h) {
  BeamformResult out;
  const Eigen::Index n = h.cols();
  const Eigen::Index m = h.rows();
  if (n == 0 || m == 0) throw InputError("beamform_gain: empty matrix");
  if (!h.allFinite()) throw InputError("beamform_gain: non-finite channel matrix");

  ComplexVector v = ComplexVector::Ones(n) / std::sqrt(static_cast<double>(n));
  if (h.squaredNorm() == 0.0) {
    out.degenerate = true;
    out.tx_beam = v;
    out.rx_beam = ComplexVector::Ones(m) / std::sqrt(static_cast<double>(m));
    return out;
  }

  double mu = 0.0;
  bool ok = power_iterate(h, v, mu, out.iterations);
  if (!ok && n > 1) {
    // Alternating-sign start, projected off the all-ones direction.
    ComplexVector w(n);
    for (Eigen::Index k = 0; k < n; ++k) w(k) = (k % 2 == 0) ? 1.0 : -1.0;
    w.array() -= w.mean();
    w /= w.norm();
    ComplexVector v2 = w;
    double mu2 = 0.0;
    out.restarted = true;
    const bool ok2 = power_iterate(h, v2, mu2, out.iterations);
    if (ok2 || mu2 > mu) {
      v = v2;
      mu = mu2;
    }
  }

  const ComplexVector hv = h * v;
  out.gain = std::sqrt(mu);
  out.tx_beam = v;
  out.rx_beam = hv / hv.norm();
  return out;
}

double noise_density_w_per_hz(const ChannelParams& params, const RadioProfile& rx) {
  return db_to_linear(params.thermal_noise_dbm_hz + rx.noise_figure_db - 30.0);
}

double effective_snr(double p_share, const RadioProfile& tx, const RadioProfile& rx,
                     const LinkChannel& chan, const ChannelParams& params) {
  if (!(p_share >= 0.0 && p_share <= 1.0)) throw InputError("p_share must lie in [0, 1]");
  if (chan.state == LinkState::kOutage) return 0.0;
  const double g = chan.beam_gain();
  return db_to_linear(params.alpha2_db) * p_share * tx.tx_power_watts() * g * g /
         (params.bandwidth_hz * noise_density_w_per_hz(params, rx));
}

double rate_from_snr(double snr, const ChannelParams& params) {
  return params.alpha1 * params.frame_s * params.bandwidth_hz * std::log2(1.0 + snr);
}

double link_rate_bits(double p_share, const RadioProfile& tx, const RadioProfile& rx,
                      const LinkChannel& chan, const ChannelParams& params) {
  return rate_from_snr(effective_snr(p_share, tx, rx, chan, params), params);
}

LinkChannel sample_link_channel(double distance_m, const RadioProfile& tx,
                                const RadioProfile& rx, const ChannelParams& params,
                                RandomStream& rng) {
  LinkChannel chan;
  chan.state = sample_link_state(distance_m, rng);
  chan.pathloss_db = sample_pathloss_db(chan.state, distance_m, rng);
  if (chan.state == LinkState::kOutage) return chan;
  chan.fading = sample_fading_matrix(rx.antenna_count(), tx.antenna_count(), params, rng);
  BeamformResult bf = beamform_gain(chan.fading);
  chan.array_gain = bf.gain;
  chan.tx_beam = std::move(bf.tx_beam);
  chan.rx_beam = std::move(bf.rx_beam);
  return chan;
}

LinkChannel reverse_channel(const LinkChannel& forward) {
  LinkChannel rev;
  rev.state = forward.state;
  rev.pathloss_db = forward.pathloss_db;
  rev.array_gain = forward.array_gain;
  if (forward.fading.size() > 0) {
    rev.fading = forward.fading.transpose();
    rev.tx_beam = forward.rx_beam.conjugate();
    rev.rx_beam = forward.tx_beam.conjugate();
  }
  return rev;
}

}  // namespace mbp

namespace mbp {

const char* to_string(FadingScale s) {
  return s == FadingScale::kArrayGain ? "array_gain" : "inverse_paths";
}

FadingScale fading_scale_from_string(std::string_view s) {
  if (s == "array_gain") return FadingScale::kArrayGain;
  if (s == "inverse_paths") return FadingScale::kInversePaths;
  throw InputError("unknown fading scale '" + std::string(s) + "'");
}

}  // namespace mbp

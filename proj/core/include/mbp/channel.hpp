#pragma once

#include <complex>
#include <limits>
#include <string_view>

#include <Eigen/Core>

#include "mbp/random.hpp"

namespace mbp {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

enum class NodeClass { kBaseStation, kRelay, kUserEquipment };

const char* to_string(NodeClass c);
NodeClass node_class_from_string(const char* s);

// Radio hardware of one node class. The planar array is
// array_side x array_side elements.
struct RadioProfile {
  NodeClass node_class = NodeClass::kBaseStation;
  double tx_power_dbm = 30.0;
  double noise_figure_db = 5.0;
  int array_side = 8;

  int antenna_count() const { return array_side * array_side; }
  double tx_power_watts() const;
  void validate() const;

  // 28 GHz picocell hardware: BS 30 dBm / 5 dB / 8x8,
  // RN 25 dBm / 6 dB / 6x6, UE 20 dBm / 7 dB / 4x4.
  static RadioProfile defaults(NodeClass c);
};

// Scaling of the clustered multipath sum over its L = N_c * N_p paths.
//   kArrayGain: sqrt(N_rx * N_tx / L), so E||H||_F^2 = N_rx * N_tx and a
//               matched beam pair collects the full array gain.
//   kInversePaths: 1 / L with unit-norm signatures, no array gain.
enum class FadingScale { kArrayGain, kInversePaths };

const char* to_string(FadingScale s);
FadingScale fading_scale_from_string(std::string_view s);

struct ChannelParams {
  double carrier_hz = 28e9;
  double bandwidth_hz = 1e9;
  double frame_s = 1e-6;
  double alpha1 = 1.0;          // spectral efficiency penalty
  double alpha2_db = -3.0;      // power efficiency penalty
  double thermal_noise_dbm_hz = -174.0;
  double cluster_rate = 1.9;    // Poisson mean of the cluster count
  int paths_per_cluster = 20;
  double angular_spread_mean_deg = 10.0;
  FadingScale fading_scale = FadingScale::kArrayGain;

  void validate() const;
};

enum class LinkState { kOutage, kLineOfSight, kNonLineOfSight };

const char* to_string(LinkState s);

// Channel of one directed link. `fading` is N_a(rx) x N_a(tx); the beams
// are the unit-norm SNR maximizers for it.
struct LinkChannel {
  LinkState state = LinkState::kOutage;
  double pathloss_db = std::numeric_limits<double>::infinity();
  ComplexMatrix fading;
  ComplexVector tx_beam;
  ComplexVector rx_beam;
  // Largest singular value of `fading`.
  double array_gain = 0.0;

  double pathloss_amplitude() const;
  // |G| = pathloss amplitude x |w_r^H H w_t|.
  double beam_gain() const { return pathloss_amplitude() * array_gain; }
};

// -- Macroscopic pathloss -------------------------------------------------

double outage_probability(double distance_m);
double los_probability(double distance_m);
double nlos_probability(double distance_m);

LinkState sample_link_state(double distance_m, RandomStream& rng);

// Pathloss without shadowing; +inf for outage.
double median_pathloss_db(LinkState state, double distance_m);
double shadowing_sigma_db(LinkState state);

double sample_pathloss_db(LinkState state, double distance_m, RandomStream& rng);

// -- Small-scale fading ---------------------------------------------------

// Half-wavelength ULA response: (1/sqrt(n)) * exp(-j*pi*k*sin(angle)).
ComplexVector ula_signature(int n, double angle_rad);
// side x side UPA response: kron(ula(azimuth), ula(elevation)).
ComplexVector upa_signature(int side, double azimuth_rad, double elevation_rad);

// Clustered multipath matrix, n_rx x n_tx. Both counts must be perfect
// squares (planar arrays).
ComplexMatrix sample_fading_matrix(int n_rx, int n_tx, const ChannelParams& params,
                                   RandomStream& rng);

// E[||H||_F^2] of sample_fading_matrix. The path gains are independent,
// so conditional on L paths it is N_rx * N_tx under kArrayGain and 1 / L
// under kInversePaths.
double expected_fading_energy(int n_rx, int n_tx, const ChannelParams& params);

// -- Beamforming ----------------------------------------------------------

struct BeamformResult {
  double gain = 0.0;
  ComplexVector tx_beam;
  ComplexVector rx_beam;
  int iterations = 0;
  bool restarted = false;
  // Set when H is zero and the beams are arbitrary.
  bool degenerate = false;
};

// max |w_r^H H w_t| over unit vectors, by power iteration on H^H H.
BeamformResult beamform_gain(const ComplexMatrix& h);

// -- Link budget ----------------------------------------------------------

// N_0 at the receiver (thermal density plus its noise figure), W/Hz.
double noise_density_w_per_hz(const ChannelParams& params, const RadioProfile& rx);

// alpha_2 * p * P * |G|^2 / (W * N_0).
double effective_snr(double p_share, const RadioProfile& tx, const RadioProfile& rx,
                     const LinkChannel& chan, const ChannelParams& params);

// Achievable bits per frame in the noise-limited regime.
double link_rate_bits(double p_share, const RadioProfile& tx, const RadioProfile& rx,
                      const LinkChannel& chan, const ChannelParams& params);

// Rate as a function of the effective SNR alone.
double rate_from_snr(double snr, const ChannelParams& params);

// Full channel draw for a link at distance d: state, pathloss, fading and
// beams. Outage links carry an empty fading matrix.
LinkChannel sample_link_channel(double distance_m, const RadioProfile& tx,
                                const RadioProfile& rx, const ChannelParams& params,
                                RandomStream& rng);

// Channel of the reverse direction under reciprocity (H^T, swapped beams).
LinkChannel reverse_channel(const LinkChannel& forward);

}  // namespace mbp

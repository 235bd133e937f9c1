#pragma once

#include <complex>
#include <vector>

#include "uavris/config.hpp"
#include "uavris/linalg.hpp"
#include "uavris/radio_map.hpp"
#include "uavris/rng.hpp"

namespace uavris {

struct ChannelParams {
  double f_c_ghz = 2.0;
  double c0_db = -30.0;           // path loss at the 1 m reference distance
  double alpha_uav_mu = 3.5;
  double alpha_uav_ris = 2.2;
  double alpha_ris_mu = 2.8;
  double noise_psd_dbm_hz = -169.0;
  double bandwidth_hz = 1e6;
  double rician_k_los = 10.0;     // linear factor (10 dB)
  double rician_k_nlos = 0.0;     // Rayleigh

  static ChannelParams from_config(const KeyValueConfig& cfg);
  static const std::set<std::string>& known_keys();
};

// Per-timeslot channel rows for one (UAV position, user set, RIS) snapshot.
struct ChannelRealization {
  int n_antennas = 0;  // M
  int n_elements = 0;  // N
  int n_users = 0;     // K
  CMat h_direct;       // K x M, rows are h_{U,k}^H
  CMat h_uav_ris;      // N x M, H_{U,S}
  CMat h_ris_mu;       // K x N, rows are h_{S,k}^H
  std::vector<bool> los_flags;  // direct-link state per user
};

struct PhaseShiftMatrix {
  std::vector<double> thetas;  // wrapped to [0, 2pi)
  std::vector<double> betas;   // amplitudes, unit under Eq.-style constraint

  static PhaseShiftMatrix unit(const std::vector<double>& thetas_in) {
    PhaseShiftMatrix p;
    p.thetas = thetas_in;
    p.betas.assign(thetas_in.size(), 1.0);
    return p;
  }
};

// Air-to-ground LoS probability. d_k is the 3D UAV-user distance, h the UAV
// altitude; throws std::invalid_argument when d_k < h.
double los_probability(double h, double d_k);

// The two closed forms feeding los_probability, exposed for tests.
double los_d0(double h);
double los_p1(double h);

// 3GPP-style UAV-to-ground path loss in dB. The NLoS branch takes the max
// with the LoS value.
double path_loss_uav_mu_db(double h, double d_k, double f_c_ghz, bool is_los);

// Reference-distance power-law path loss as a linear power gain:
// 10^(c0_db/10) * d^-alpha. Distances below the 1 m reference are clamped
// to 1 m; *clamped reports when that happened.
double path_loss_ris_mu_gain(double d, double c0_db, double alpha,
                             bool* clamped = nullptr);

// Noise power in mW over the given bandwidth.
double noise_power_mw(double noise_psd_dbm_hz, double bandwidth_hz);

// Unit-mean-power small-scale coefficient: Rician with factor
// rician_k_los when LoS, rician_k_nlos (0 => Rayleigh) otherwise.
cplx small_scale_fading(bool is_los, const ChannelParams& params, Rng& rng);

// Inputs that position a channel snapshot in space.
struct ChannelGeometry {
  double uav_x = 0, uav_y = 0, uav_altitude = 0;
  Vec3 ris_position;
  std::vector<std::pair<double, double>> user_xy;
};

enum class LosMode { kRadioMap, kProbabilistic };

// Draws a full channel realization. Direct-link LoS is geometric occlusion
// (radio-map mode) or a Bernoulli draw from los_probability. The UAV-RIS
// link is deterministically LoS (RIS mounted high); RIS-MU fading is Rician
// with the LoS factor. ris_enabled=false zeroes the cascaded matrices.
ChannelRealization draw_channel(const ChannelGeometry& geo, int n_antennas,
                                int n_elements, const ChannelParams& params,
                                const RadioMap& map, LosMode mode,
                                bool ris_enabled, Rng& rng);

// h_{U,k}^H + h_{S,k}^H diag(beta_n e^{j theta_n}) H_{U,S} for user k.
std::vector<cplx> assemble_combined_row(int k, const ChannelRealization& real,
                                        const PhaseShiftMatrix& phi);

}  // namespace uavris

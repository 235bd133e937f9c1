#include "uavris/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavris {

ChannelParams ChannelParams::from_config(const KeyValueConfig& cfg) {
  ChannelParams p;
  p.f_c_ghz = cfg.get_double("f_c_ghz", p.f_c_ghz);
  p.c0_db = cfg.get_double("c0_db", p.c0_db);
  p.alpha_uav_mu = cfg.get_double("alpha_uav_mu", p.alpha_uav_mu);
  p.alpha_uav_ris = cfg.get_double("alpha_uav_ris", p.alpha_uav_ris);
  p.alpha_ris_mu = cfg.get_double("alpha_ris_mu", p.alpha_ris_mu);
  p.noise_psd_dbm_hz = cfg.get_double("noise_psd_dbm_hz", p.noise_psd_dbm_hz);
  p.bandwidth_hz = cfg.get_double("bandwidth_hz", p.bandwidth_hz);
  p.rician_k_los = cfg.get_double("rician_k_los", p.rician_k_los);
  p.rician_k_nlos = cfg.get_double("rician_k_nlos", p.rician_k_nlos);
  if (p.f_c_ghz <= 0) throw ConfigError("f_c_ghz must be positive");
  if (p.bandwidth_hz <= 0) throw ConfigError("bandwidth_hz must be positive");
  if (p.alpha_uav_mu <= 0 || p.alpha_uav_ris <= 0 || p.alpha_ris_mu <= 0)
    throw ConfigError("path loss exponents must be positive");
  if (p.rician_k_los < 0 || p.rician_k_nlos < 0)
    throw ConfigError("rician factors must be >= 0");
  return p;
}

const std::set<std::string>& ChannelParams::known_keys() {
  static const std::set<std::string> keys = {
      "f_c_ghz", "c0_db", "alpha_uav_mu", "alpha_uav_ris", "alpha_ris_mu",
      "noise_psd_dbm_hz", "bandwidth_hz", "rician_k_los", "rician_k_nlos"};
  return keys;
}

double los_d0(double h) {
  return std::max(294.05 * std::log10(h) - 432.94, 18.0);
}

double los_p1(double h) { return 233.98 * std::log10(h) - 0.95; }

double los_probability(double h, double d_k) {
  if (h <= 0.0) throw std::invalid_argument("los_probability: h must be > 0");
  if (d_k < h)
    throw std::invalid_argument(
        "los_probability: d_k < h is geometrically impossible");
  const double r = std::sqrt(d_k * d_k - h * h);
  const double d0 = los_d0(h);
  if (r <= d0) return 1.0;
  const double p1 = los_p1(h);
  return d0 / r + std::exp(-r / p1) * (1.0 - d0 / r);
}

double path_loss_uav_mu_db(double h, double d_k, double f_c_ghz, bool is_los) {
  if (h <= 0.0 || d_k <= 0.0 || f_c_ghz <= 0.0)
    throw std::invalid_argument("path_loss_uav_mu_db: inputs must be positive");
  const double l_los = 30.9 + (22.25 - 0.5 * std::log10(h)) * std::log10(d_k) +
                       20.0 * std::log10(f_c_ghz);
  if (is_los) return l_los;
  const double l_nlos = 32.4 + (43.2 - 7.6 * std::log10(h)) * std::log10(d_k) +
                        20.0 * std::log10(f_c_ghz);
  return std::max(l_los, l_nlos);
}

double path_loss_ris_mu_gain(double d, double c0_db, double alpha, bool* clamped) {
  if (clamped) *clamped = false;
  if (d < 1.0) {
    d = 1.0;
    if (clamped) *clamped = true;
  }
  return std::pow(10.0, c0_db / 10.0) * std::pow(d, -alpha);
}

double noise_power_mw(double noise_psd_dbm_hz, double bandwidth_hz) {
  return std::pow(10.0, (noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz)) / 10.0);
}

cplx small_scale_fading(bool is_los, const ChannelParams& params, Rng& rng) {
  const double k = is_los ? params.rician_k_los : params.rician_k_nlos;
  // Specular part with a random phase, plus CN(0,1) scatter, scaled so
  // E[|h|^2] = 1 for every k.
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const cplx specular = std::polar(1.0, phase);
  const cplx scatter(rng.normal() * std::numbers::sqrt2 / 2.0,
                     rng.normal() * std::numbers::sqrt2 / 2.0);
  return std::sqrt(k / (k + 1.0)) * specular + std::sqrt(1.0 / (k + 1.0)) * scatter;
}

namespace {

double amplitude_from_db(double loss_db) {
  // |G|^2 = 10^(-L/10), so the amplitude factor is 10^(-L/20).
  return std::pow(10.0, -loss_db / 20.0);
}

double dist3(double dx, double dy, double dz) {
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

ChannelRealization draw_channel(const ChannelGeometry& geo, int n_antennas,
                                int n_elements, const ChannelParams& params,
                                const RadioMap& map, LosMode mode,
                                bool ris_enabled, Rng& rng) {
  const int m = n_antennas, n = n_elements;
  const int k_users = static_cast<int>(geo.user_xy.size());
  ChannelRealization out;
  out.n_antennas = m;
  out.n_elements = n;
  out.n_users = k_users;
  out.h_direct = CMat(k_users, m);
  out.h_uav_ris = CMat(n, m);
  out.h_ris_mu = CMat(k_users, n);
  out.los_flags.assign(k_users, true);

  const Vec3 uav{geo.uav_x, geo.uav_y, geo.uav_altitude};

  // UAV-RIS: deterministically LoS, reference power law with its own exponent.
  if (ris_enabled) {
    const double d_us = dist3(uav.x - geo.ris_position.x, uav.y - geo.ris_position.y,
                              uav.z - geo.ris_position.z);
    const double gain_us = path_loss_ris_mu_gain(d_us, params.c0_db, params.alpha_uav_ris);
    const double amp_us = std::sqrt(gain_us);
    for (int e = 0; e < n; ++e)
      for (int a = 0; a < m; ++a)
        out.h_uav_ris.at(e, a) = amp_us * small_scale_fading(true, params, rng);
  }

  for (int k = 0; k < k_users; ++k) {
    const auto [ux, uy] = geo.user_xy[k];
    const Vec3 user{ux, uy, 0.0};
    const double d_k = dist3(uav.x - ux, uav.y - uy, uav.z);

    bool los;
    if (mode == LosMode::kRadioMap) {
      los = is_los(map, uav, user);
    } else {
      los = rng.bernoulli(los_probability(geo.uav_altitude, std::max(d_k, geo.uav_altitude)));
    }
    out.los_flags[k] = los;

    const double loss_db =
        path_loss_uav_mu_db(geo.uav_altitude, std::max(d_k, 1.0), params.f_c_ghz, los);
    const double amp_direct = amplitude_from_db(loss_db);
    for (int a = 0; a < m; ++a)
      out.h_direct.at(k, a) = amp_direct * small_scale_fading(los, params, rng);

    if (ris_enabled) {
      const double d_sm = dist3(geo.ris_position.x - ux, geo.ris_position.y - uy,
                                geo.ris_position.z);
      const double gain_sm = path_loss_ris_mu_gain(d_sm, params.c0_db, params.alpha_ris_mu);
      const double amp_sm = std::sqrt(gain_sm);
      for (int e = 0; e < n; ++e)
        out.h_ris_mu.at(k, e) = amp_sm * small_scale_fading(true, params, rng);
    }
  }
  return out;
}

std::vector<cplx> assemble_combined_row(int k, const ChannelRealization& real,
                                        const PhaseShiftMatrix& phi) {
  if (k < 0 || k >= real.n_users)
    throw std::out_of_range("assemble_combined_row: user index out of range");
  if (static_cast<int>(phi.thetas.size()) != real.n_elements ||
      static_cast<int>(phi.betas.size()) != real.n_elements)
    throw std::invalid_argument("assemble_combined_row: phase vector size mismatch");

  std::vector<cplx> row(real.n_antennas);
  for (int a = 0; a < real.n_antennas; ++a) row[a] = real.h_direct.at(k, a);
  for (int e = 0; e < real.n_elements; ++e) {
    const cplx theta = phi.betas[e] * std::polar(1.0, phi.thetas[e]);
    const cplx lhs = real.h_ris_mu.at(k, e) * theta;
    if (lhs == cplx{}) continue;
    for (int a = 0; a < real.n_antennas; ++a)
      row[a] += lhs * real.h_uav_ris.at(e, a);
  }
  return row;
}

}  // namespace uavris

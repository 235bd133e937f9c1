#include "uavris/energy.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uavris {

double RotorParams::blade_profile_power() const {
  return profile_drag / 8.0 * air_density * rotor_solidity * disc_area *
         blade_omega * blade_omega * blade_omega * rotor_radius * rotor_radius *
         rotor_radius;
}

double RotorParams::induced_power() const {
  return (1.0 + induced_correction) * std::pow(weight, 1.5) /
         std::sqrt(2.0 * air_density * disc_area);
}

RotorParams RotorParams::from_config(const KeyValueConfig& cfg) {
  RotorParams p;
  p.profile_drag = cfg.get_double("rotor_profile_drag", p.profile_drag);
  p.air_density = cfg.get_double("air_density", p.air_density);
  p.rotor_solidity = cfg.get_double("rotor_solidity", p.rotor_solidity);
  p.disc_area = cfg.get_double("rotor_disc_area", p.disc_area);
  p.blade_omega = cfg.get_double("blade_omega", p.blade_omega);
  p.rotor_radius = cfg.get_double("rotor_radius", p.rotor_radius);
  p.induced_correction = cfg.get_double("induced_correction", p.induced_correction);
  p.weight = cfg.get_double("uav_weight_n", p.weight);
  p.induced_velocity = cfg.get_double("hover_induced_velocity", p.induced_velocity);
  p.fuselage_drag_ratio = cfg.get_double("fuselage_drag_ratio", p.fuselage_drag_ratio);
  p.tip_speed = cfg.get_double("blade_tip_speed", p.tip_speed);
  for (double v : {p.profile_drag, p.air_density, p.rotor_solidity, p.disc_area,
                   p.blade_omega, p.rotor_radius, p.induced_correction, p.weight,
                   p.induced_velocity, p.fuselage_drag_ratio, p.tip_speed})
    if (v <= 0.0) throw ConfigError("rotor parameters must be strictly positive");
  return p;
}

const std::set<std::string>& RotorParams::known_keys() {
  static const std::set<std::string> keys = {
      "rotor_profile_drag", "air_density", "rotor_solidity", "rotor_disc_area",
      "blade_omega", "rotor_radius", "induced_correction", "uav_weight_n",
      "hover_induced_velocity", "fuselage_drag_ratio", "blade_tip_speed"};
  return keys;
}

double propulsion_power(double v, const RotorParams& p) {
  if (v < 0.0) throw std::invalid_argument("propulsion_power: v must be >= 0");
  const double e_b = p.blade_profile_power();
  const double e_i = p.induced_power();
  const double v2 = v * v;
  const double v0_2 = p.induced_velocity * p.induced_velocity;
  const double blade = e_b * (1.0 + 3.0 * v2 / (p.tip_speed * p.tip_speed));
  // Induced-power bracket taken to the 1/2 power (standard rotary-wing
  // form; at v = 0 the bracket is exactly 1 either way).
  const double bracket =
      std::sqrt(1.0 + v2 * v2 / (4.0 * v0_2 * v0_2)) - v2 / (2.0 * v0_2);
  const double induced = e_i * std::sqrt(bracket);
  const double parasite = 0.5 * p.fuselage_drag_ratio * p.air_density *
                          p.rotor_solidity * p.disc_area * v2 * v;
  return blade + induced + parasite;
}

double slot_energy(bool moved, double speed, double slot_duration_s,
                   const RotorParams& p) {
  if (slot_duration_s <= 0.0)
    throw std::invalid_argument("slot_energy: slot duration must be > 0");
  return propulsion_power(moved ? speed : 0.0, p) * slot_duration_s;
}

double episode_energy(const SlotEnergyLedger& ledger) {
  return std::accumulate(ledger.per_slot_j.begin(), ledger.per_slot_j.end(), 0.0);
}

}  // namespace uavris

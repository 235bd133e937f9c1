#pragma once

#include <vector>

#include "uavris/config.hpp"

namespace uavris {

// Rotary-wing propulsion model constants plus the two derived hover powers.
struct RotorParams {
  double profile_drag = 0.012;      // delta
  double air_density = 1.225;       // rho, kg/m^3
  double rotor_solidity = 0.05;     // s
  double disc_area = 0.503;         // A, m^2
  double blade_omega = 300.0;       // rad/s
  double rotor_radius = 0.4;        // m
  double induced_correction = 0.1;  // kappa
  double weight = 20.0;             // N
  double induced_velocity = 4.03;   // v0, m/s
  double fuselage_drag_ratio = 0.6; // f_d
  double tip_speed = 120.0;         // U_tip, m/s

  // Blade profile power in hover: (delta/8) rho s A Omega^3 R^3.
  double blade_profile_power() const;
  // Induced power in hover: (1+kappa) W^(3/2) / sqrt(2 rho A).
  double induced_power() const;

  static RotorParams from_config(const KeyValueConfig& cfg);
  static const std::set<std::string>& known_keys();
};

struct SlotEnergyLedger {
  double slot_duration_s = 1.0;  // T_r
  std::vector<double> per_slot_j;

  void record(double joules) { per_slot_j.push_back(joules); }
  void clear() { per_slot_j.clear(); }
};

// Instantaneous propulsion power at speed v (m/s), in Watts.
double propulsion_power(double v, const RotorParams& p);

// Energy of one slot: the UAV either hovers or moves at constant speed V.
double slot_energy(bool moved, double speed, double slot_duration_s,
                   const RotorParams& p);

double episode_energy(const SlotEnergyLedger& ledger);

}  // namespace uavris

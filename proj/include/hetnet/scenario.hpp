#ifndef HETNET_SCENARIO_HPP
#define HETNET_SCENARIO_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "hetnet/types.hpp"

namespace hetnet {

// ---------------------------------------------------------------------------
// Unit helpers (power in watt, gains as linear power ratios).
// ---------------------------------------------------------------------------

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// ---------------------------------------------------------------------------
// Two-tier downlink drop: a few macro sites on a fixed grid, a handful of
// small cells dropped uniformly inside each macro's disc, users dropped
// uniformly over the union of the discs. All placement obeys the usual
// minimum-separation rules; link gains combine distance pathloss,
// penetration loss, antenna gain and lognormal shadowing.
// ---------------------------------------------------------------------------

enum class CellKind { Macro, Pico };

struct Cell {
  CellKind kind = CellKind::Macro;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  // metres
  double tx_psd = 0.0;   // transmit power spectral density, W/Hz (flat)
  Index parent = -1;     // owning macro for picos, -1 for macros
};

struct User {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  // metres
  double weight = 1.0;   // utility weight
};

struct ScenarioConfig {
  Index num_macros = 3;
  Index picos_per_macro = 4;
  Index num_users = 50;

  double bandwidth_hz = 10e6;

  double macro_power_dbm = 46.0;  // total transmit power per macro
  double pico_power_dbm = 30.0;   // total transmit power per pico

  double macro_antenna_gain_db = 15.0;
  double pico_antenna_gain_db = 5.0;
  double penetration_loss_db = 20.0;

  double macro_shadow_std_db = 8.0;
  double pico_shadow_std_db = 10.0;
  double macro_shadow_corr = 1.0;  // cross-cell shadowing correlation, macro tier
  double pico_shadow_corr = 0.5;   // cross-cell shadowing correlation, pico tier

  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 9.0;

  double min_macro_user_m = 35.0;
  double min_pico_user_m = 10.0;
  double min_macro_pico_m = 75.0;
  double min_pico_pico_m = 40.0;

  // Macro sites default to an equilateral triangle with this spacing,
  // centred at the origin; give macro_positions to override.
  double inter_site_distance_m = 500.0;
  double drop_radius_m = 250.0;  // pico/user drop disc radius around each site
  std::vector<Eigen::Vector2d> macro_positions;

  double user_weight = 1.0;  // applied to every user

  void validate() const;  // throws InputError
};

struct Scenario {
  double bandwidth_hz = 0.0;
  double noise_psd = 0.0;  // W/Hz, thermal floor plus receiver noise figure
  std::uint64_t seed = 0;

  std::vector<Cell> cells;  // macros first, then picos grouped by parent
  std::vector<User> users;

  // Linear power gain of link user k -> cell b (pathloss, penetration,
  // antenna gain and shadowing combined). Strictly positive.
  MatrixX<double> gain;

  Index num_cells() const { return static_cast<Index>(cells.size()); }
  Index num_users() const { return static_cast<Index>(users.size()); }
  Index num_macros() const;
  VectorX<double> weights() const;
};

// Distance-dependent pathloss in dB; distance_m must be positive.
double pathloss_db(CellKind kind, double distance_m);

// Deterministic drop: identical (config, seed) pairs produce identical
// scenarios. Throws GenerationFailure if the separation constraints cannot
// be met within the attempt budget.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

// Wideband received power of cell b at user k, in dBm.
double received_power_dbm(const Scenario& s, Index user, Index cell);

}  // namespace hetnet

#endif  // HETNET_SCENARIO_HPP

#include "hetnet/scenario.hpp"

#include <cmath>
#include <string>

#include "hetnet/errors.hpp"
#include "hetnet/rng.hpp"

namespace hetnet {

namespace {

constexpr int kMaxPlacementAttempts = 200000;

double dist(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return (a - b).norm(); }

}  // namespace

void ScenarioConfig::validate() const {
  if (num_macros < 1) throw InputError("config: need at least one macro site");
  if (picos_per_macro < 0) throw InputError("config: picos_per_macro must be >= 0");
  if (num_users < 1) throw InputError("config: need at least one user");
  if (!(bandwidth_hz > 0)) throw InputError("config: bandwidth must be positive");
  if (!(drop_radius_m > 0)) throw InputError("config: drop radius must be positive");
  if (!(inter_site_distance_m > 0)) throw InputError("config: inter-site distance must be positive");
  if (min_macro_user_m < 0 || min_pico_user_m < 0 || min_macro_pico_m < 0 || min_pico_pico_m < 0)
    throw InputError("config: minimum separations must be >= 0");
  if (min_macro_user_m >= drop_radius_m)
    throw InputError("config: user exclusion radius leaves no room inside the drop disc");
  if (picos_per_macro > 0 && min_macro_pico_m >= drop_radius_m)
    throw InputError("config: pico exclusion radius leaves no room inside the drop disc");
  if (macro_shadow_std_db < 0 || pico_shadow_std_db < 0)
    throw InputError("config: shadowing std must be >= 0");
  if (macro_shadow_corr < 0 || macro_shadow_corr > 1 || pico_shadow_corr < 0 || pico_shadow_corr > 1)
    throw InputError("config: shadowing correlations must lie in [0, 1]");
  if (!macro_positions.empty() && static_cast<Index>(macro_positions.size()) != num_macros)
    throw InputError("config: macro_positions size must match num_macros");
  if (!(user_weight > 0)) throw InputError("config: user weight must be positive");
}

double pathloss_db(CellKind kind, double distance_m) {
  if (!(distance_m > 0)) throw InputError("pathloss: distance must be positive");
  const double r_km = distance_m / 1000.0;
  if (kind == CellKind::Macro) return 128.1 + 37.6 * std::log10(r_km);
  return 140.7 + 36.7 * std::log10(r_km);
}

Index Scenario::num_macros() const {
  Index n = 0;
  for (const Cell& c : cells)
    if (c.kind == CellKind::Macro) ++n;
  return n;
}

VectorX<double> Scenario::weights() const {
  VectorX<double> w(num_users());
  for (Index k = 0; k < num_users(); ++k) w[k] = users[k].weight;
  return w;
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);

  Scenario s;
  s.bandwidth_hz = config.bandwidth_hz;
  s.noise_psd = dbm_to_watt(config.noise_psd_dbm_hz + config.noise_figure_db);
  s.seed = seed;

  // Macro sites: explicit positions, or an equilateral triangle (circumradius
  // isd/sqrt(3)) centred at the origin, truncated/extended for other counts
  // by walking a ring.
  std::vector<Eigen::Vector2d> macro_pos;
  if (!config.macro_positions.empty()) {
    macro_pos = config.macro_positions;
  } else if (config.num_macros == 1) {
    macro_pos.emplace_back(0.0, 0.0);
  } else {
    const double ring = config.inter_site_distance_m /
                        (2.0 * std::sin(M_PI / static_cast<double>(config.num_macros)));
    for (Index m = 0; m < config.num_macros; ++m) {
      const double theta = M_PI / 2.0 + 2.0 * M_PI * static_cast<double>(m) /
                                            static_cast<double>(config.num_macros);
      macro_pos.emplace_back(ring * std::cos(theta), ring * std::sin(theta));
    }
  }

  const double macro_psd = dbm_to_watt(config.macro_power_dbm) / config.bandwidth_hz;
  const double pico_psd = dbm_to_watt(config.pico_power_dbm) / config.bandwidth_hz;

  for (Index m = 0; m < config.num_macros; ++m)
    s.cells.push_back({CellKind::Macro, macro_pos[m], macro_psd, -1});

  // Picos: uniform in the parent disc, re-drawn until the macro and pico
  // separation rules hold.
  for (Index m = 0; m < config.num_macros; ++m) {
    for (Index p = 0; p < config.picos_per_macro; ++p) {
      Eigen::Vector2d pos;
      int attempt = 0;
      for (;; ++attempt) {
        if (attempt >= kMaxPlacementAttempts)
          throw GenerationFailure("pico placement: attempt budget exhausted (macro " +
                                  std::to_string(m) + ")");
        const double radius = config.drop_radius_m * std::sqrt(rng.uniform());
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        pos = macro_pos[m] + radius * Eigen::Vector2d(std::cos(theta), std::sin(theta));
        bool ok = true;
        for (const auto& mp : macro_pos)
          if (dist(pos, mp) < config.min_macro_pico_m) ok = false;
        for (const Cell& c : s.cells)
          if (c.kind == CellKind::Pico && dist(pos, c.position) < config.min_pico_pico_m) ok = false;
        if (ok) break;
      }
      s.cells.push_back({CellKind::Pico, pos, pico_psd, m});
    }
  }

  // Users: uniform over the union of the macro discs (rejection from the
  // bounding box so overlapping discs are not double-weighted), re-drawn
  // until the cell exclusion radii hold.
  Eigen::Vector2d lo = macro_pos[0], hi = macro_pos[0];
  for (const auto& mp : macro_pos) {
    lo = lo.cwiseMin(mp);
    hi = hi.cwiseMax(mp);
  }
  lo.array() -= config.drop_radius_m;
  hi.array() += config.drop_radius_m;

  for (Index k = 0; k < config.num_users; ++k) {
    Eigen::Vector2d pos;
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt >= kMaxPlacementAttempts)
        throw GenerationFailure("user placement: attempt budget exhausted (user " +
                                std::to_string(k) + ")");
      pos = Eigen::Vector2d(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()));
      bool inside = false;
      for (const auto& mp : macro_pos)
        if (dist(pos, mp) <= config.drop_radius_m) inside = true;
      if (!inside) continue;
      bool ok = true;
      for (const Cell& c : s.cells) {
        const double m = c.kind == CellKind::Macro ? config.min_macro_user_m : config.min_pico_user_m;
        if (dist(pos, c.position) < m) ok = false;
      }
      if (ok) break;
    }
    s.users.push_back({pos, config.user_weight});
  }

  // Shadowing: per user, one common normal per tier plus an independent
  // per-link normal, mixed to hit the configured cross-cell correlation.
  // The per-link draw happens for every cell regardless of the correlation
  // value so the stream layout does not depend on the parameters.
  const Index b_total = s.num_cells();
  const Index k_total = s.num_users();
  s.gain.resize(k_total, b_total);
  for (Index k = 0; k < k_total; ++k) {
    const double common_macro = rng.normal();
    const double common_pico = rng.normal();
    for (Index b = 0; b < b_total; ++b) {
      const Cell& c = s.cells[b];
      const bool macro = c.kind == CellKind::Macro;
      const double corr = macro ? config.macro_shadow_corr : config.pico_shadow_corr;
      const double stddev = macro ? config.macro_shadow_std_db : config.pico_shadow_std_db;
      const double common = macro ? common_macro : common_pico;
      const double local = rng.normal();
      const double shadow_db =
          stddev * (std::sqrt(corr) * common + std::sqrt(1.0 - corr) * local);
      const double antenna =
          macro ? config.macro_antenna_gain_db : config.pico_antenna_gain_db;
      const double gain_db = -pathloss_db(c.kind, dist(s.users[k].position, c.position)) -
                             config.penetration_loss_db + antenna + shadow_db;
      s.gain(k, b) = db_to_linear(gain_db);
    }
  }

  return s;
}

double received_power_dbm(const Scenario& s, Index user, Index cell) {
  if (user < 0 || user >= s.num_users() || cell < 0 || cell >= s.num_cells())
    throw InputError("received_power_dbm: index out of range");
  return watt_to_dbm(s.cells[cell].tx_psd * s.bandwidth_hz * s.gain(user, cell));
}

}  // namespace hetnet

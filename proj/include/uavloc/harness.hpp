#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavloc/simnet.hpp"

namespace uavloc {

/// Scenario family for experiments. The built-in "circle" template spaces UAV
/// starting points around a ring near the AOI rim at fixed altitude; each UAV
/// flies a dog-leg sweep into the box (inward leg, then a 90-degree turn of
/// seeded direction). Start radius and track length carry per-UAV jitter and
/// the whole fleet is rotated by a seeded angle, so trial geometry varies.
struct ScenarioTemplate {
  std::string name = "circle";
  int n_uavs = 5;
  int samples_per_uav = 8;
  double aoi_side_m = 12000.0;
  double altitude_m = 60.0;
  double start_radius_m = 5100.0;
  double radius_jitter_m = 500.0;
  double track_length_m = 12950.0;
  double length_jitter_m = 1750.0;
  double radial_fraction = 0.4;  // share of the track flown inward before the turn
  double speed_mps = 60.0;
  ChannelParams channel;
};

struct SweepSpec {
  enum class Kind { Rounds, UavCount, GridStep };
  Kind kind = Kind::UavCount;
  std::vector<double> values;
};

/// Per-method solver settings for experiments. The DMM budget defaults to its
/// few-round operating point (communication-limited); DGN runs to convergence.
struct MethodOptions {
  double dmm_tol = 1.0;
  int dmm_max_iter = 4;
  double dgn_tol = 0.01;
  int dgn_max_iter = 50;
  std::optional<double> dgn_damping;
  double grid_step = 200.0;
  int tau = 3;
  int p = 32;
  int q = 32;
};

struct ExperimentConfig {
  ScenarioTemplate scenario;
  std::vector<Method> methods = {Method::Dmm, Method::Dgn, Method::Def, Method::Dem};
  int trials = 500;
  std::uint64_t seed = 1;
  SweepSpec sweep;
  MethodOptions options;
  std::string out_path;

  void validate() const;
};

struct RmseRow {
  double sweep_value = 0.0;
  Method method = Method::Dmm;
  double rmse_m = 0.0;
  double crlb_root_m = 0.0;
  std::int64_t bits = 0;
  std::int64_t flops = 0;
  int trials = 0;
  int failures = 0;
};

struct RmseTable {
  std::vector<RmseRow> rows;
};

/// Deterministic scenario instantiation: UAV geometry from the template, the
/// emitter drawn uniformly in the AOI from `seed`.
Scenario build_scenario(const ScenarioTemplate& tmpl, std::uint64_t seed);
Scenario build_scenario(const std::string& template_name, int n_uavs, int samples_per_uav,
                        std::uint64_t seed);

/// Per-method starting point for the iterative solvers: centroid of the UAV
/// starting positions clamped into the AOI.
Vec3 default_init(const Scenario& scenario);

/// Monte Carlo RMSE experiment over the configured sweep. Each trial draws a
/// fresh emitter and fresh noise from streams derived from (seed, sweep index,
/// trial), so runs are reproducible and method-order independent.
RmseTable monte_carlo(const ExperimentConfig& config);

/// CSV with header sweep,method,rmse_m,crlb_root_m,bits,flops,trials,failures.
void emit_csv(const RmseTable& table, const std::string& path);

/// Scenario file I/O (JSON): AOI, emitter, per-UAV initial position, legs,
/// sample count, channel parameters.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

/// Experiment configuration file I/O (JSON), mirroring ExperimentConfig.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

}  // namespace uavloc

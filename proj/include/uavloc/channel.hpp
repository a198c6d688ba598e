#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uavloc/geometry.hpp"

namespace uavloc {

/// Log-distance path-loss model parameters, per UAV.
/// noise_var is the variance of the log-normal shadowing term in dB^2.
struct ChannelParams {
  double p0_db = 30.0;      // reference power at d0
  double d0_m = 1.0;        // reference distance
  double ple = 3.0;         // path-loss exponent
  double noise_var = 6.0;   // shadowing variance, dB^2

  void validate() const;
};

/// One UAV: its flight plan and its channel.
struct UavConfig {
  TrajectoryPlan plan;
  ChannelParams channel;
};

/// Full simulation scenario: search box, emitter ground truth, UAV fleet.
struct Scenario {
  Aoi aoi;
  Vec3 emitter = Vec3::Zero();
  std::vector<UavConfig> uavs;

  int uav_count() const { return static_cast<int>(uavs.size()); }
  int total_sample_count() const;
};

/// RSS samples of one UAV along its trajectory, with the channel they were
/// drawn from. rss[j] was measured at waypoints[j].
struct MeasurementSet {
  int uav_index = 1;
  std::vector<Waypoint> waypoints;
  std::vector<double> rss_db;
  ChannelParams params;

  int sample_count() const { return static_cast<int>(rss_db.size()); }
  void validate() const;
};

/// Mean received power at distance d: p0 - 10*ple*log10(d/d0).
double mean_rss(const ChannelParams& params, double d);

/// Distance whose noiseless mean RSS equals `rss_db`; inverse of mean_rss.
double invert_rss(const ChannelParams& params, double rss_db);

/// Draw one noisy measurement set per UAV. Shadowing is Gaussian in the dB
/// domain, independent across UAVs and samples. Same seed, same output.
std::vector<MeasurementSet> sample_measurements(const Scenario& scenario, std::uint64_t seed);

/// Sum over all UAVs and samples of (d_tilde - ||u - s||)^2, with d_tilde the
/// distance inverted from the measured RSS.
double ls_objective(std::span<const MeasurementSet> meas, const Vec3& s);

/// Gradient of one UAV's contribution to ls_objective at s:
/// sum_j 2(||u_j - s|| - d_tilde_j) * (s - u_j)/||s - u_j||.
Vec3 ls_gradient(const MeasurementSet& meas_i, const Vec3& s);

/// Joint Gaussian log-likelihood of the measurements at candidate position s.
double log_likelihood(std::span<const MeasurementSet> meas, const Vec3& s);

/// CSV with columns uav_id,sample_id,x,y,z,rss_db.
void write_measurements_csv(std::span<const MeasurementSet> meas, const std::string& path);
std::vector<MeasurementSet> read_measurements_csv(const std::string& path,
                                                  const ChannelParams& params);

}  // namespace uavloc

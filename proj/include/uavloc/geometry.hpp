#pragma once

#include <Eigen/Core>
#include <vector>

#include "uavloc/errors.hpp"

namespace uavloc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// One constant-velocity leg of a trajectory: fly at `velocity` [m/s] for
/// `duration` [s] between two consecutive sample points.
struct TrajectoryLeg {
  Vec3 velocity = Vec3::Zero();
  double duration = 0.0;
};

/// Piecewise-constant-velocity flight plan. Samples are taken exactly at leg
/// boundaries, so a plan with M samples has M-1 legs.
class TrajectoryPlan {
public:
  TrajectoryPlan(Vec3 initial_position, std::vector<TrajectoryLeg> legs);

  const Vec3& initial_position() const { return initial_position_; }
  const std::vector<TrajectoryLeg>& legs() const { return legs_; }
  int sample_count() const { return static_cast<int>(legs_.size()) + 1; }

private:
  Vec3 initial_position_;
  std::vector<TrajectoryLeg> legs_;
};

/// Position of one UAV at one measurement instant. Indices are 1-based.
struct Waypoint {
  Vec3 position = Vec3::Zero();
  int uav_index = 1;
  int sample_index = 1;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool degenerate() const { return hi <= lo; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double length() const { return hi - lo; }
};

/// Axis-aligned box known to contain the emitter. A degenerate axis (lo == hi)
/// marks a coordinate that is known exactly and excluded from searches.
struct Aoi {
  Interval x_range;
  Interval y_range;
  Interval z_range;

  Vec3 clamp(const Vec3& p) const {
    return Vec3(x_range.clamp(p.x()), y_range.clamp(p.y()), z_range.clamp(p.z()));
  }
  bool contains(const Vec3& p) const {
    return x_range.contains(p.x()) && y_range.contains(p.y()) && z_range.contains(p.z());
  }
  /// Indices of the non-degenerate axes, ascending.
  std::vector<int> active_dims() const;
};

/// Position at the j-th sample (1-based): initial position plus the sum of
/// duration * velocity over the first j-1 legs.
Waypoint waypoint(const TrajectoryPlan& plan, int j, int uav_index = 1);

/// All sample_count waypoints of a plan, in sample order.
std::vector<Waypoint> waypoints(const TrajectoryPlan& plan, int uav_index = 1);

/// Euclidean distance in meters.
double distance(const Vec3& p, const Vec3& s);

/// Straight line: equal legs of `velocity` for `leg_duration` each.
TrajectoryPlan make_straight_plan(const Vec3& start, const Vec3& velocity, double leg_duration,
                                  int sample_count);

/// Dog-leg sweep: `bend_after` legs along `first_velocity`, the remaining legs
/// along `second_velocity`. Breaks the mirror ambiguity a straight track has.
TrajectoryPlan make_dogleg_plan(const Vec3& start, const Vec3& first_velocity,
                                const Vec3& second_velocity, int bend_after, double leg_duration,
                                int sample_count);

}  // namespace uavloc

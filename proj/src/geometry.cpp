#include "uavloc/geometry.hpp"

#include <cmath>
#include <utility>

namespace uavloc {

TrajectoryPlan::TrajectoryPlan(Vec3 initial_position, std::vector<TrajectoryLeg> legs)
    : initial_position_(std::move(initial_position)), legs_(std::move(legs)) {
  for (const TrajectoryLeg& leg : legs_) {
    if (!(leg.duration > 0.0)) {
      throw ContractViolationError("TrajectoryPlan: leg durations must be strictly positive");
    }
  }
}

std::vector<int> Aoi::active_dims() const {
  std::vector<int> dims;
  if (!x_range.degenerate()) dims.push_back(0);
  if (!y_range.degenerate()) dims.push_back(1);
  if (!z_range.degenerate()) dims.push_back(2);
  return dims;
}

Waypoint waypoint(const TrajectoryPlan& plan, int j, int uav_index) {
  if (j < 1 || j > plan.sample_count()) {
    throw ContractViolationError("waypoint: sample index " + std::to_string(j) +
                                 " out of range 1.." + std::to_string(plan.sample_count()));
  }
  Vec3 pos = plan.initial_position();
  for (int k = 0; k < j - 1; ++k) {
    const TrajectoryLeg& leg = plan.legs()[static_cast<std::size_t>(k)];
    pos += leg.duration * leg.velocity;
  }
  return Waypoint{pos, uav_index, j};
}

std::vector<Waypoint> waypoints(const TrajectoryPlan& plan, int uav_index) {
  std::vector<Waypoint> out;
  out.reserve(static_cast<std::size_t>(plan.sample_count()));
  Vec3 pos = plan.initial_position();
  out.push_back(Waypoint{pos, uav_index, 1});
  for (int k = 0; k < plan.sample_count() - 1; ++k) {
    const TrajectoryLeg& leg = plan.legs()[static_cast<std::size_t>(k)];
    pos += leg.duration * leg.velocity;
    out.push_back(Waypoint{pos, uav_index, k + 2});
  }
  return out;
}

double distance(const Vec3& p, const Vec3& s) { return (p - s).norm(); }

TrajectoryPlan make_straight_plan(const Vec3& start, const Vec3& velocity, double leg_duration,
                                  int sample_count) {
  if (sample_count < 1) {
    throw ContractViolationError("make_straight_plan: sample_count must be positive");
  }
  std::vector<TrajectoryLeg> legs(static_cast<std::size_t>(sample_count - 1),
                                  TrajectoryLeg{velocity, leg_duration});
  return TrajectoryPlan(start, std::move(legs));
}

TrajectoryPlan make_dogleg_plan(const Vec3& start, const Vec3& first_velocity,
                                const Vec3& second_velocity, int bend_after, double leg_duration,
                                int sample_count) {
  if (sample_count < 1) {
    throw ContractViolationError("make_dogleg_plan: sample_count must be positive");
  }
  std::vector<TrajectoryLeg> legs;
  legs.reserve(static_cast<std::size_t>(sample_count - 1));
  for (int k = 0; k < sample_count - 1; ++k) {
    legs.push_back(TrajectoryLeg{k < bend_after ? first_velocity : second_velocity, leg_duration});
  }
  return TrajectoryPlan(start, std::move(legs));
}

}  // namespace uavloc

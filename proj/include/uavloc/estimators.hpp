#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uavloc/channel.hpp"

namespace uavloc {

enum class Method { Dmm, Dgn, Def, Dem, Avg };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Estimated emitter position. `info` carries the Fisher information matrix
/// evaluated at the estimate when the producing method computes one.
struct PositionEstimate {
  Vec3 position = Vec3::Zero();
  std::optional<Mat3> info;
  Method source = Method::Avg;
};

/// Symmetry/PSD validation for an information matrix attached to an estimate.
void validate_info(const Mat3& info);

struct DmmResult {
  PositionEstimate estimate;
  int iterations = 0;
  std::vector<double> objective_history;  // ls_objective at init and each iterate
  std::vector<Vec3> iterates;             // init and each accepted iterate
};

struct DgnResult {
  PositionEstimate estimate;
  int iterations = 0;
};

/// One DMM local step: s_c - (N / 2K) * ls_gradient(meas_i, s_c).
Vec3 dmm_local_update(const Vec3& s_c, const MeasurementSet& meas_i, int uav_count,
                      int total_sample_count);

/// Center fusion: arithmetic mean of the local iterates.
Vec3 dmm_fuse(std::span<const Vec3> locals);

/// Full DMM loop: local updates, mean fusion, clamp to the AOI box. Stops when
/// the fused step is within `tol` meters or after `max_iter` iterations.
/// `on_round(k, locals, fused)` fires once per completed round when set.
using DmmRoundObserver =
    std::function<void(int round, std::span<const Vec3> locals, const Vec3& fused)>;
DmmResult run_dmm(std::span<const MeasurementSet> meas, const Aoi& aoi, const Vec3& init,
                  double tol, int max_iter, const DmmRoundObserver& on_round = nullptr);

/// Per-UAV grid search over the cell centers of the AOI box, step `step_m` per
/// axis, on the non-degenerate axes only. Minimizes the dB-domain residual sum
/// and attaches the Fisher information evaluated at the winning node.
/// Ties break toward the lexicographically smallest node (x, then y, then z).
PositionEstimate grid_search_local(const MeasurementSet& meas_i, const Aoi& aoi, double step_m);

/// Fisher information of one UAV's measurements about position s.
Mat3 fim_single(const ChannelParams& params, std::span<const Waypoint> wps, const Vec3& s);

/// BLUE-style fusion with matrix weights W_i = (sum_k F_k)^-1 F_i computed on
/// the `dims` sub-block (all axes by default). Weights sum to identity.
PositionEstimate def_fuse(std::span<const PositionEstimate> locals,
                          std::span<const int> dims = {});
std::vector<Mat3> def_fusion_weights(std::span<const PositionEstimate> locals,
                                     std::span<const int> dims = {});

/// Scalar-weight fusion: w_i proportional to 1 / Tr(F_i^-1), sub-block as above.
PositionEstimate dem_fuse(std::span<const PositionEstimate> locals,
                          std::span<const int> dims = {});
std::vector<double> dem_fusion_weights(std::span<const PositionEstimate> locals,
                                       std::span<const int> dims = {});

/// Unweighted mean of the local positions.
PositionEstimate avg_fuse(std::span<const PositionEstimate> locals);

/// Damped distributed Gauss-Newton on the least-squares objective. Each round
/// every UAV forms A_i = J_i^T J_i and g_i = J_i^T r_i for the range residuals
/// r_ij = d_tilde_ij - ||u_ij - s||; the center solves
/// (sum A_i + damping I) delta = sum g_i on the AOI's non-degenerate axes and
/// steps s += delta, clamped to the box. `damping` empty selects
/// 1e-6 * Tr(sum A_i)/dims per round; an explicit 0 requests an undamped solve.
using DgnRoundObserver = std::function<void(int round, const Vec3& iterate)>;
DgnResult run_dgn(std::span<const MeasurementSet> meas, const Aoi& aoi, const Vec3& init,
                  double tol, int max_iter, std::optional<double> damping = std::nullopt,
                  const DgnRoundObserver& on_round = nullptr);

}  // namespace uavloc

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uavloc/channel.hpp"

namespace uavloc {

/// Per-UAV and total Fisher information about the emitter position.
/// crlb_trace is Tr(F^-1) in m^2, empty when the total is near-singular.
struct FimReport {
  std::vector<Mat3> per_uav;
  Mat3 total = Mat3::Zero();
  std::optional<double> crlb_trace;
};

/// Condition-number ceiling beyond which the geometry counts as unobservable.
inline constexpr double kCrlbConditionLimit = 1e12;

/// Total Fisher information: sum of the per-UAV matrices at position s.
FimReport fim_total(const Scenario& scenario, const Vec3& s);

/// Tr(F^-1) via the cofactor/determinant expansion of the 3x3 inverse,
/// evaluated in extended precision. Throws UnobservableGeometryError when the
/// matrix is near-singular (condition number above kCrlbConditionLimit).
double crlb_trace_from_fim(const Mat3& fim);

/// CRLB of the full scenario at position s.
double crlb(const Scenario& scenario, const Vec3& s);

/// CRLB restricted to a known-coordinate problem: inverse of the sub-block of
/// F over `dims`. Used when some axes of the AOI are degenerate.
double crlb_trace_subblock(const Mat3& fim, std::span<const int> dims);

}  // namespace uavloc

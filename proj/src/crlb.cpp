#include "uavloc/crlb.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "uavloc/estimators.hpp"

namespace uavloc {

FimReport fim_total(const Scenario& scenario, const Vec3& s) {
  FimReport report;
  report.per_uav.reserve(scenario.uavs.size());
  for (int i = 0; i < scenario.uav_count(); ++i) {
    const UavConfig& uav = scenario.uavs[static_cast<std::size_t>(i)];
    const std::vector<Waypoint> wps = waypoints(uav.plan, i + 1);
    report.per_uav.push_back(fim_single(uav.channel, wps, s));
    report.total += report.per_uav.back();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(report.total);
  const double max_ev = eig.eigenvalues().maxCoeff();
  const double min_ev = eig.eigenvalues().minCoeff();
  if (max_ev > 0.0 && min_ev > max_ev / kCrlbConditionLimit) {
    report.crlb_trace = crlb_trace_from_fim(report.total);
  }
  return report;
}

double crlb_trace_from_fim(const Mat3& fim) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(fim);
  const double max_ev = eig.eigenvalues().maxCoeff();
  const double min_ev = eig.eigenvalues().minCoeff();
  if (!(max_ev > 0.0) || !(min_ev > max_ev / kCrlbConditionLimit)) {
    throw UnobservableGeometryError("crlb: Fisher information is near-singular");
  }
  // Sum of the diagonal cofactors over the determinant, the closed form of
  // Tr(F^-1) for a symmetric 3x3 matrix. Extended precision keeps the two
  // algebraic routes in agreement for ill-scaled matrices.
  const long double e11 = fim(0, 0), e12 = fim(0, 1), e13 = fim(0, 2);
  const long double e22 = fim(1, 1), e23 = fim(1, 2), e33 = fim(2, 2);
  const long double det = e11 * (e22 * e33 - e23 * e23) - e12 * (e12 * e33 - e13 * e23) +
                          e13 * (e12 * e23 - e13 * e22);
  const long double cof_sum =
      (e11 * e22 - e12 * e12) + (e11 * e33 - e13 * e13) + (e22 * e33 - e23 * e23);
  return static_cast<double>(cof_sum / det);
}

double crlb(const Scenario& scenario, const Vec3& s) {
  return crlb_trace_from_fim(fim_total(scenario, s).total);
}

double crlb_trace_subblock(const Mat3& fim, std::span<const int> dims) {
  if (dims.empty()) return 0.0;
  const auto n = static_cast<Eigen::Index>(dims.size());
  Eigen::MatrixXd sub(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      sub(a, b) = fim(dims[static_cast<std::size_t>(a)], dims[static_cast<std::size_t>(b)]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
  const double max_ev = eig.eigenvalues().maxCoeff();
  const double min_ev = eig.eigenvalues().minCoeff();
  if (!(max_ev > 0.0) || !(min_ev > max_ev / kCrlbConditionLimit)) {
    throw UnobservableGeometryError("crlb: information sub-block is near-singular");
  }
  return sub.inverse().trace();
}

}  // namespace uavloc

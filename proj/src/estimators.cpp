#include "uavloc/estimators.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>

namespace uavloc {

namespace {

constexpr int kAllDims[3] = {0, 1, 2};

std::span<const int> dims_or_all(std::span<const int> dims) {
  return dims.empty() ? std::span<const int>(kAllDims) : dims;
}

Eigen::MatrixXd sub_matrix(const Mat3& m, std::span<const int> dims) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      out(a, b) = m(dims[static_cast<std::size_t>(a)], dims[static_cast<std::size_t>(b)]);
    }
  }
  return out;
}

Eigen::VectorXd sub_vector(const Vec3& v, std::span<const int> dims) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  Eigen::VectorXd out(n);
  for (Eigen::Index a = 0; a < n; ++a) out(a) = v(dims[static_cast<std::size_t>(a)]);
  return out;
}

/// Sum of outer products of the RSS partial-derivative vectors; the Fisher
/// information before division by the noise variance.
Mat3 unnormalized_fim(const ChannelParams& params, std::span<const Waypoint> wps, const Vec3& s) {
  const double scale = -10.0 * params.ple / std::numbers::ln10;
  Mat3 f = Mat3::Zero();
  for (const Waypoint& wp : wps) {
    const Vec3 diff = s - wp.position;
    const double d2 = diff.squaredNorm();
    if (!(d2 > 0.0)) {
      throw SingularGeometryError("fim: position coincides with waypoint " +
                                  std::to_string(wp.sample_index) + " of UAV " +
                                  std::to_string(wp.uav_index));
    }
    const Vec3 g = scale * diff / d2;
    f += g * g.transpose();
  }
  return f;
}

void require_locals(std::span<const PositionEstimate> locals, bool need_info, const char* who) {
  if (locals.empty()) throw ContractViolationError(std::string(who) + ": empty estimate list");
  if (need_info) {
    for (const PositionEstimate& e : locals) {
      if (!e.info) {
        throw ContractViolationError(std::string(who) + ": local estimate lacks information matrix");
      }
    }
  }
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Dmm: return "DMM";
    case Method::Dgn: return "DGN";
    case Method::Def: return "DEF";
    case Method::Dem: return "DEM";
    case Method::Avg: return "AVG";
  }
  throw ContractViolationError("method_name: unknown method tag");
}

Method method_from_name(const std::string& name) {
  if (name == "DMM" || name == "dmm") return Method::Dmm;
  if (name == "DGN" || name == "dgn") return Method::Dgn;
  if (name == "DEF" || name == "def") return Method::Def;
  if (name == "DEM" || name == "dem") return Method::Dem;
  if (name == "AVG" || name == "avg") return Method::Avg;
  throw ConfigurationError("unknown method name: " + name);
}

void validate_info(const Mat3& info) {
  const double scale = std::max(1.0, info.cwiseAbs().maxCoeff());
  if (((info - info.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale) {
    throw ContractViolationError("information matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(info);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw ContractViolationError("information matrix is not positive semidefinite");
  }
}

Vec3 dmm_local_update(const Vec3& s_c, const MeasurementSet& meas_i, int uav_count,
                      int total_sample_count) {
  if (uav_count < 1 || total_sample_count < 1) {
    throw ContractViolationError("dmm_local_update: counts must be positive");
  }
  const Vec3 b = ls_gradient(meas_i, s_c);
  return s_c - (static_cast<double>(uav_count) / (2.0 * total_sample_count)) * b;
}

Vec3 dmm_fuse(std::span<const Vec3> locals) {
  if (locals.empty()) throw ContractViolationError("dmm_fuse: empty list");
  Vec3 sum = Vec3::Zero();
  for (const Vec3& v : locals) sum += v;
  return sum / static_cast<double>(locals.size());
}

DmmResult run_dmm(std::span<const MeasurementSet> meas, const Aoi& aoi, const Vec3& init,
                  double tol, int max_iter, const DmmRoundObserver& on_round) {
  if (meas.empty()) throw ContractViolationError("run_dmm: no measurements");
  if (!aoi.contains(init)) throw ContractViolationError("run_dmm: init outside AOI");
  const int n = static_cast<int>(meas.size());
  int total = 0;
  for (const MeasurementSet& set : meas) total += set.sample_count();

  DmmResult result;
  Vec3 s = init;
  result.iterates.push_back(s);
  result.objective_history.push_back(ls_objective(meas, s));
  std::vector<Vec3> locals(static_cast<std::size_t>(n));
  for (int k = 1; k <= max_iter; ++k) {
    for (int i = 0; i < n; ++i) {
      locals[static_cast<std::size_t>(i)] =
          dmm_local_update(s, meas[static_cast<std::size_t>(i)], n, total);
    }
    const Vec3 fused = aoi.clamp(dmm_fuse(locals));
    if (on_round) on_round(k, locals, fused);
    const double moved = (fused - s).norm();
    s = fused;
    result.iterates.push_back(s);
    result.objective_history.push_back(ls_objective(meas, s));
    result.iterations = k;
    if (moved <= tol) break;
  }
  result.estimate = PositionEstimate{s, std::nullopt, Method::Dmm};
  return result;
}

PositionEstimate grid_search_local(const MeasurementSet& meas_i, const Aoi& aoi, double step_m) {
  if (!(step_m > 0.0)) throw ContractViolationError("grid_search_local: step must be positive");
  meas_i.validate();

  const Interval ranges[3] = {aoi.x_range, aoi.y_range, aoi.z_range};
  int counts[3];
  double cells[3];
  for (int a = 0; a < 3; ++a) {
    if (ranges[a].degenerate()) {
      counts[a] = 1;
      cells[a] = 0.0;
    } else {
      counts[a] = std::max(1, static_cast<int>(std::ceil(ranges[a].length() / step_m - 1e-12)));
      cells[a] = ranges[a].length() / counts[a];
    }
  }
  auto node_coord = [&](int axis, int m) {
    return ranges[axis].degenerate() ? ranges[axis].lo : ranges[axis].lo + (m + 0.5) * cells[axis];
  };

  double best = std::numeric_limits<double>::infinity();
  Vec3 best_node = Vec3(ranges[0].lo, ranges[1].lo, ranges[2].lo);
  // Lexicographic scan order plus strict improvement gives the documented
  // smallest-node tie-break.
  for (int ix = 0; ix < counts[0]; ++ix) {
    for (int iy = 0; iy < counts[1]; ++iy) {
      for (int iz = 0; iz < counts[2]; ++iz) {
        const Vec3 node(node_coord(0, ix), node_coord(1, iy), node_coord(2, iz));
        double res = 0.0;
        bool feasible = true;
        for (std::size_t j = 0; j < meas_i.rss_db.size(); ++j) {
          const double d = distance(meas_i.waypoints[j].position, node);
          if (!(d > 0.0)) {
            feasible = false;
            break;
          }
          const double r = meas_i.rss_db[j] - mean_rss(meas_i.params, d);
          res += r * r;
        }
        if (feasible && res < best) {
          best = res;
          best_node = node;
        }
      }
    }
  }
  if (!std::isfinite(best)) {
    throw SingularGeometryError("grid_search_local: every grid node coincides with a waypoint");
  }

  PositionEstimate est;
  est.position = best_node;
  est.source = Method::Def;
  // Zero-variance channels attach the unit-variance information; a common
  // variance factor cancels out of both DEF and DEM fusion weights.
  Mat3 info = unnormalized_fim(meas_i.params, meas_i.waypoints, best_node);
  if (meas_i.params.noise_var > 0.0) info /= meas_i.params.noise_var;
  validate_info(info);
  est.info = info;
  return est;
}

Mat3 fim_single(const ChannelParams& params, std::span<const Waypoint> wps, const Vec3& s) {
  if (!(params.noise_var > 0.0)) {
    throw ContractViolationError("fim_single: noise variance must be positive");
  }
  return unnormalized_fim(params, wps, s) / params.noise_var;
}

std::vector<Mat3> def_fusion_weights(std::span<const PositionEstimate> locals,
                                     std::span<const int> dims_in) {
  require_locals(locals, true, "def_fuse");
  const auto dims = dims_or_all(dims_in);
  const auto n = static_cast<Eigen::Index>(dims.size());

  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  for (const PositionEstimate& e : locals) total += sub_matrix(*e.info, dims);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(total);
  if (!lu.isInvertible()) {
    throw RankDeficientFusionError("def_fuse: total information matrix is singular");
  }

  const double inactive_share = 1.0 / static_cast<double>(locals.size());
  std::vector<Mat3> weights;
  weights.reserve(locals.size());
  for (const PositionEstimate& e : locals) {
    const Eigen::MatrixXd w = lu.solve(sub_matrix(*e.info, dims));
    Mat3 full = Mat3::Zero();
    for (int a = 0; a < 3; ++a) full(a, a) = inactive_share;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        full(dims[static_cast<std::size_t>(a)], dims[static_cast<std::size_t>(b)]) = w(a, b);
      }
    }
    weights.push_back(full);
  }
  return weights;
}

PositionEstimate def_fuse(std::span<const PositionEstimate> locals, std::span<const int> dims) {
  const std::vector<Mat3> weights = def_fusion_weights(locals, dims);
  Vec3 fused = Vec3::Zero();
  Mat3 total = Mat3::Zero();
  for (std::size_t i = 0; i < locals.size(); ++i) {
    fused += weights[i] * locals[i].position;
    total += *locals[i].info;
  }
  return PositionEstimate{fused, total, Method::Def};
}

std::vector<double> dem_fusion_weights(std::span<const PositionEstimate> locals,
                                       std::span<const int> dims_in) {
  require_locals(locals, true, "dem_fuse");
  const auto dims = dims_or_all(dims_in);
  std::vector<double> inv_trace;
  inv_trace.reserve(locals.size());
  double sum = 0.0;
  for (const PositionEstimate& e : locals) {
    const Eigen::MatrixXd f = sub_matrix(*e.info, dims);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(f);
    if (!lu.isInvertible()) {
      throw RankDeficientFusionError("dem_fuse: local information matrix is singular");
    }
    const double mse_proxy = lu.inverse().trace();
    inv_trace.push_back(1.0 / mse_proxy);
    sum += inv_trace.back();
  }
  for (double& w : inv_trace) w /= sum;
  return inv_trace;
}

PositionEstimate dem_fuse(std::span<const PositionEstimate> locals, std::span<const int> dims) {
  const std::vector<double> weights = dem_fusion_weights(locals, dims);
  Vec3 fused = Vec3::Zero();
  for (std::size_t i = 0; i < locals.size(); ++i) fused += weights[i] * locals[i].position;
  return PositionEstimate{fused, std::nullopt, Method::Dem};
}

PositionEstimate avg_fuse(std::span<const PositionEstimate> locals) {
  require_locals(locals, false, "avg_fuse");
  Vec3 sum = Vec3::Zero();
  for (const PositionEstimate& e : locals) sum += e.position;
  return PositionEstimate{sum / static_cast<double>(locals.size()), std::nullopt, Method::Avg};
}

DgnResult run_dgn(std::span<const MeasurementSet> meas, const Aoi& aoi, const Vec3& init,
                  double tol, int max_iter, std::optional<double> damping,
                  const DgnRoundObserver& on_round) {
  if (meas.empty()) throw ContractViolationError("run_dgn: no measurements");
  if (!aoi.contains(init)) throw ContractViolationError("run_dgn: init outside AOI");
  if (damping && *damping < 0.0) throw ContractViolationError("run_dgn: damping must be nonnegative");

  const std::vector<int> dims = aoi.active_dims();
  const auto n = static_cast<Eigen::Index>(dims.size());
  if (n == 0) return DgnResult{PositionEstimate{init, std::nullopt, Method::Dgn}, 0};

  Vec3 s = init;
  DgnResult result;
  for (int k = 1; k <= max_iter; ++k) {
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (const MeasurementSet& set : meas) {
      for (std::size_t j = 0; j < set.rss_db.size(); ++j) {
        const Vec3& u = set.waypoints[j].position;
        const double d = distance(u, s);
        if (!(d > 0.0)) {
          throw SingularGeometryError("run_dgn: iterate coincides with a waypoint");
        }
        const Eigen::VectorXd jac = sub_vector((s - u) / d, dims);
        const double resid = invert_rss(set.params, set.rss_db[j]) - d;
        normal += jac * jac.transpose();
        rhs += jac * resid;
      }
    }
    const double lambda =
        damping ? *damping : 1e-6 * normal.trace() / static_cast<double>(n);
    normal += lambda * Eigen::MatrixXd::Identity(n, n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    if (!lu.isInvertible()) {
      throw RankDeficientSolveError("run_dgn: singular normal matrix with zero damping");
    }
    const Eigen::VectorXd delta = lu.solve(rhs);
    Vec3 next = s;
    for (Eigen::Index a = 0; a < n; ++a) next(dims[static_cast<std::size_t>(a)]) += delta(a);
    next = aoi.clamp(next);
    const double moved = (next - s).norm();
    s = next;
    result.iterations = k;
    if (on_round) on_round(k, s);
    if (moved <= tol) break;
  }
  result.estimate = PositionEstimate{s, std::nullopt, Method::Dgn};
  return result;
}

}  // namespace uavloc

#include "uavloc/channel.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "uavloc/rng.hpp"

namespace uavloc {

void ChannelParams::validate() const {
  if (!(d0_m > 0.0)) throw ContractViolationError("ChannelParams: d0 must be positive");
  if (!(ple > 0.0)) throw ContractViolationError("ChannelParams: path-loss exponent must be positive");
  if (noise_var < 0.0) throw ContractViolationError("ChannelParams: noise variance must be nonnegative");
}

int Scenario::total_sample_count() const {
  int k = 0;
  for (const UavConfig& uav : uavs) k += uav.plan.sample_count();
  return k;
}

void MeasurementSet::validate() const {
  if (waypoints.size() != rss_db.size()) {
    throw ContractViolationError("MeasurementSet: waypoint and rss counts differ");
  }
}

double mean_rss(const ChannelParams& params, double d) {
  if (!(d > 0.0)) {
    throw SingularGeometryError("mean_rss: distance must be positive, got " + std::to_string(d));
  }
  return params.p0_db - 10.0 * params.ple * std::log10(d / params.d0_m);
}

double invert_rss(const ChannelParams& params, double rss_db) {
  return std::pow(10.0, (params.p0_db - rss_db) / (10.0 * params.ple)) * params.d0_m;
}

std::vector<MeasurementSet> sample_measurements(const Scenario& scenario, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::vector<MeasurementSet> out;
  out.reserve(scenario.uavs.size());
  for (int i = 0; i < scenario.uav_count(); ++i) {
    const UavConfig& uav = scenario.uavs[static_cast<std::size_t>(i)];
    uav.channel.validate();
    MeasurementSet set;
    set.uav_index = i + 1;
    set.params = uav.channel;
    set.waypoints = waypoints(uav.plan, i + 1);
    set.rss_db.reserve(set.waypoints.size());
    const double noise_std = std::sqrt(uav.channel.noise_var);
    for (const Waypoint& wp : set.waypoints) {
      const double d = distance(wp.position, scenario.emitter);
      if (!(d > 0.0)) {
        throw SingularGeometryError("sample_measurements: emitter coincides with waypoint of UAV " +
                                    std::to_string(set.uav_index));
      }
      set.rss_db.push_back(mean_rss(uav.channel, d) + noise_std * unit_normal(rng));
    }
    out.push_back(std::move(set));
  }
  return out;
}

double ls_objective(std::span<const MeasurementSet> meas, const Vec3& s) {
  double total = 0.0;
  for (const MeasurementSet& set : meas) {
    for (std::size_t j = 0; j < set.rss_db.size(); ++j) {
      const double d_tilde = invert_rss(set.params, set.rss_db[j]);
      const double d = distance(set.waypoints[j].position, s);
      const double r = d_tilde - d;
      total += r * r;
    }
  }
  return total;
}

Vec3 ls_gradient(const MeasurementSet& meas_i, const Vec3& s) {
  Vec3 grad = Vec3::Zero();
  for (std::size_t j = 0; j < meas_i.rss_db.size(); ++j) {
    const Vec3& u = meas_i.waypoints[j].position;
    const double d = distance(u, s);
    if (!(d > 0.0)) {
      throw SingularGeometryError("ls_gradient: candidate coincides with waypoint " +
                                  std::to_string(j + 1) + " of UAV " +
                                  std::to_string(meas_i.uav_index));
    }
    const double d_tilde = invert_rss(meas_i.params, meas_i.rss_db[j]);
    grad += 2.0 * (d - d_tilde) * (s - u) / d;
  }
  return grad;
}

double log_likelihood(std::span<const MeasurementSet> meas, const Vec3& s) {
  double total = 0.0;
  for (const MeasurementSet& set : meas) {
    const double sigma = set.params.noise_var;
    double quad = 0.0;
    for (std::size_t j = 0; j < set.rss_db.size(); ++j) {
      const double d = distance(set.waypoints[j].position, s);
      if (!(d > 0.0)) {
        throw SingularGeometryError("log_likelihood: candidate coincides with a waypoint");
      }
      const double r = set.rss_db[j] - mean_rss(set.params, d);
      quad += r * r;
    }
    if (sigma == 0.0) {
      if (quad > 0.0) {
        throw DegenerateLikelihoodError("log_likelihood: zero variance with nonzero residual");
      }
      total += std::numeric_limits<double>::infinity();
      continue;
    }
    const double m = static_cast<double>(set.sample_count());
    total += -0.5 * m * std::log(2.0 * std::numbers::pi * sigma) - quad / (2.0 * sigma);
  }
  return total;
}

void write_measurements_csv(std::span<const MeasurementSet> meas, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_measurements_csv: cannot open " + path);
  out.imbue(std::locale::classic());
  out << "uav_id,sample_id,x,y,z,rss_db\n";
  out.precision(17);
  for (const MeasurementSet& set : meas) {
    for (std::size_t j = 0; j < set.rss_db.size(); ++j) {
      const Vec3& p = set.waypoints[j].position;
      out << set.uav_index << ',' << (j + 1) << ',' << p.x() << ',' << p.y() << ',' << p.z() << ','
          << set.rss_db[j] << '\n';
    }
  }
  if (!out) throw IoError("write_measurements_csv: write failed for " + path);
}

std::vector<MeasurementSet> read_measurements_csv(const std::string& path,
                                                  const ChannelParams& params) {
  std::ifstream in(path);
  if (!in) throw IoError("read_measurements_csv: cannot open " + path);
  in.imbue(std::locale::classic());
  std::string line;
  if (!std::getline(in, line)) throw IoError("read_measurements_csv: empty file " + path);
  std::map<int, MeasurementSet> by_uav;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    int uav_id = 0, sample_id = 0;
    double x = 0, y = 0, z = 0, rss = 0;
    char c = ',';
    row >> uav_id >> c >> sample_id >> c >> x >> c >> y >> c >> z >> c >> rss;
    if (!row) throw IoError("read_measurements_csv: malformed row in " + path);
    MeasurementSet& set = by_uav[uav_id];
    set.uav_index = uav_id;
    set.params = params;
    set.waypoints.push_back(Waypoint{Vec3(x, y, z), uav_id, sample_id});
    set.rss_db.push_back(rss);
  }
  std::vector<MeasurementSet> out;
  out.reserve(by_uav.size());
  for (auto& [id, set] : by_uav) out.push_back(std::move(set));
  return out;
}

}  // namespace uavloc

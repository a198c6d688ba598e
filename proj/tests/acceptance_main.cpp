// Acceptance suite: every release criterion of the simulator, one verdict
// line each. Exits nonzero if any criterion fails.
#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uavloc/crlb.hpp"
#include "uavloc/harness.hpp"
#include "uavloc/rng.hpp"
#include "uavloc/simnet.hpp"

using namespace uavloc;

namespace {

int g_failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, label.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

Scenario reference_scenario(int n_uavs, std::uint64_t seed) {
  return build_scenario("circle", n_uavs, 8, seed);
}

double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const double idx = p * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (values[hi] - values[lo]) * (idx - lo);
}

// 1. DMM converges within a few rounds: median iterations to reach 1 m of its
//    own limit point over 500 trials, and a hard bound for the 95th percentile.
void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> iters_to_tol;
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t seed = mix_seed(0xC1, static_cast<std::uint64_t>(trial));
    const Scenario scenario = reference_scenario(5, seed);
    const auto meas = sample_measurements(scenario, mix_seed(seed, 1));
    const DmmResult result = run_dmm(meas, scenario.aoi, default_init(scenario), 1.0, 50);
    const Vec3 limit = result.iterates.back();
    for (std::size_t k = 0; k < result.iterates.size(); ++k) {
      if ((result.iterates[k] - limit).norm() <= 1.0) {
        iters_to_tol.push_back(static_cast<double>(k));
        break;
      }
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double median = percentile(iters_to_tol, 0.5);
  const double p95 = percentile(iters_to_tol, 0.95);
  const bool pass = median <= 4.0 && p95 <= 10.0 && elapsed < 60.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "median %.1f (<= 4), p95 %.1f (<= 10), %.1f s (< 60), 500 trials", median, p95,
                elapsed);
  report(1, "DMM iterations to 1 m of its limit point", pass, detail);
}

// 2. The 2K-curvature surrogate dominates the LS objective everywhere.
void criterion_2() {
  std::mt19937_64 rng(0xC2);
  std::uniform_real_distribution<double> coord(0.0, 12000.0);
  int violations = 0;
  long checked = 0;
  for (int scen = 0; scen < 20; ++scen) {
    const std::uint64_t seed = mix_seed(0xC2, static_cast<std::uint64_t>(scen));
    const Scenario scenario = reference_scenario(5, seed);
    const auto meas = sample_measurements(scenario, mix_seed(seed, 1));
    const double total = scenario.total_sample_count();
    for (int rep = 0; rep < 1000; ++rep) {
      const Vec3 s(coord(rng), coord(rng), 0.0);
      const Vec3 sk(coord(rng), coord(rng), 0.0);
      Vec3 grad = Vec3::Zero();
      for (const MeasurementSet& set : meas) grad += ls_gradient(set, sk);
      const double lhs = ls_objective(meas, s);
      const double rhs =
          ls_objective(meas, sk) + grad.dot(s - sk) + total * (s - sk).squaredNorm();
      if (lhs > rhs + 1e-9 * std::max(1.0, std::abs(rhs))) ++violations;
      ++checked;
    }
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail), "%d violations in %ld pairs", violations, checked);
  report(2, "quadratic surrogate majorizes the LS objective", violations == 0, detail);
}

// 3. DMM objective history is non-increasing on noisy runs.
void criterion_3() {
  int bad_runs = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t seed = mix_seed(0xC3, static_cast<std::uint64_t>(trial));
    const Scenario scenario = reference_scenario(5, seed);
    const auto meas = sample_measurements(scenario, mix_seed(seed, 1));
    const DmmResult result = run_dmm(meas, scenario.aoi, default_init(scenario), 1.0, 50);
    for (std::size_t k = 1; k < result.objective_history.size(); ++k) {
      if (result.objective_history[k] >
          result.objective_history[k - 1] + 1e-9 * std::max(1.0, result.objective_history[k - 1])) {
        ++bad_runs;
        break;
      }
    }
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail), "%d of 500 runs violated descent", bad_runs);
  report(3, "DMM descent property", bad_runs == 0, detail);
}

// 4. Analytic LS gradient against central finite differences of an
//    extended-precision objective (keeps the oracle's own noise floor down).
void criterion_4() {
  std::mt19937_64 rng(0xC4);
  std::uniform_real_distribution<double> coord(200.0, 11800.0);
  double worst = 0.0;
  for (int scen = 0; scen < 20; ++scen) {
    const std::uint64_t seed = mix_seed(0xC4, static_cast<std::uint64_t>(scen));
    const Scenario scenario = reference_scenario(5, seed);
    const auto meas = sample_measurements(scenario, mix_seed(seed, 1));
    for (int rep = 0; rep < 100; ++rep) {
      const Vec3 s(coord(rng), coord(rng), 0.0);
      Vec3 grad = Vec3::Zero();
      for (const MeasurementSet& set : meas) grad += ls_gradient(set, s);
      const Vec3 fd = oracles::fd_gradient_ld(meas, s);
      worst = std::max(worst, (grad - fd).norm() / std::max(1.0, fd.norm()));
    }
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail), "max relative error %.2e (<= 1e-6), 2000 points", worst);
  report(4, "LS gradient matches finite differences", worst <= 1e-6, detail);
}

// 5. Fisher information against two oracles: the Monte Carlo curvature of the
//    log-likelihood and an independently assembled outer-product route.
void criterion_5() {
  const Scenario scenario = reference_scenario(5, 0xC5);
  const Vec3 truth = scenario.emitter;

  Mat3 mc = Mat3::Zero();
  const int draws = 10000;
  for (int rep = 0; rep < draws; ++rep) {
    const auto meas =
        sample_measurements(scenario, mix_seed(0xC5, 7, static_cast<std::uint64_t>(rep)));
    mc -= oracles::fd_hessian([&](const Vec3& x) { return log_likelihood(meas, x); }, truth, 1.0) /
          draws;
  }
  const FimReport report_fim = fim_total(scenario, truth);
  const double mc_rel = (mc - report_fim.total).norm() / report_fim.total.norm();

  double outer_rel = 0.0;
  for (int i = 0; i < scenario.uav_count(); ++i) {
    const UavConfig& uav = scenario.uavs[static_cast<std::size_t>(i)];
    const std::vector<Waypoint> wps = waypoints(uav.plan, i + 1);
    Eigen::MatrixXd g(static_cast<Eigen::Index>(wps.size()), 3);
    for (Eigen::Index j = 0; j < g.rows(); ++j) {
      const Vec3 diff = truth - wps[static_cast<std::size_t>(j)].position;
      g.row(j) = (-10.0 * uav.channel.ple / std::numbers::ln10) * diff.transpose() /
                 diff.squaredNorm();
    }
    const Mat3 oracle = (g.transpose() * g) / uav.channel.noise_var;
    outer_rel = std::max(outer_rel, (report_fim.per_uav[static_cast<std::size_t>(i)] - oracle)
                                            .cwiseAbs()
                                            .maxCoeff() /
                                        oracle.cwiseAbs().maxCoeff());
  }

  const bool pass = mc_rel <= 0.02 && outer_rel <= 1e-12;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "Monte Carlo curvature %.2f%% (<= 2%%, %d draws), outer-product %.1e (<= 1e-12)",
                100.0 * mc_rel, draws, outer_rel);
  report(5, "Fisher information against both oracles", pass, detail);
}

// 6. Cofactor/determinant CRLB expression equals the direct inverse trace.
void criterion_6() {
  std::mt19937_64 rng(0xC6);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Mat3 f = oracles::random_spd(rng);
    const double direct = f.inverse().trace();
    worst = std::max(worst, std::abs(crlb_trace_from_fim(f) - direct) / std::abs(direct));
  }
  for (int scen = 0; scen < 20; ++scen) {
    const Scenario scenario = reference_scenario(5, mix_seed(0xC6, static_cast<std::uint64_t>(scen)));
    const Mat3 f = fim_total(scenario, scenario.emitter).total;
    const double direct = f.inverse().trace();
    worst = std::max(worst, std::abs(crlb_trace_from_fim(f) - direct) / std::abs(direct));
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail),
                "max relative gap %.2e (<= 1e-10), 100 SPD + 20 scenarios", worst);
  report(6, "CRLB cofactor route equals the inverse trace", worst <= 1e-10, detail);
}

// 7. MSE ordering of the fusion schemes on random SPD covariance sets.
void criterion_7() {
  std::mt19937_64 rng(0xC7);
  int violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 7);
    Mat3 inv_sum = Mat3::Zero();
    double harmonic = 0.0, min_trace = 1e300;
    for (int i = 0; i < n; ++i) {
      const Mat3 c = oracles::random_spd(rng);
      inv_sum += c.inverse();
      harmonic += 1.0 / c.trace();
      min_trace = std::min(min_trace, c.trace());
    }
    const double mse_f = inv_sum.inverse().trace();
    const double mse_m = 1.0 / harmonic;
    if (mse_f > mse_m * (1.0 + 1e-12) || mse_m > min_trace * (1.0 + 1e-12)) ++violations;
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail), "%d violations in 1000 covariance sets", violations);
  report(7, "matrix fusion <= scalar fusion <= best single (MSE)", violations == 0, detail);
}

// 8. RMSE ordering of the four methods across fleet sizes.
void criterion_8() {
  ExperimentConfig config;
  config.methods = {Method::Dmm, Method::Dgn, Method::Def, Method::Dem};
  config.trials = 500;
  config.seed = 0xC8;
  config.sweep.kind = SweepSpec::Kind::UavCount;
  config.sweep.values = {4.0, 6.0, 8.0};
  const RmseTable table = monte_carlo(config);

  bool pass = true;
  std::string detail;
  for (double n : config.sweep.values) {
    double dmm = 0, dgn = 0, def = 0, dem = 0;
    for (const RmseRow& row : table.rows) {
      if (row.sweep_value != n) continue;
      if (row.method == Method::Dmm) dmm = row.rmse_m;
      if (row.method == Method::Dgn) dgn = row.rmse_m;
      if (row.method == Method::Def) def = row.rmse_m;
      if (row.method == Method::Dem) dem = row.rmse_m;
    }
    const bool ok = dgn <= 1.05 * def && def <= 1.05 * dem && dem <= 1.05 * dmm;
    pass = pass && ok;
    char part[160];
    std::snprintf(part, sizeof(part), "N=%.0f: DGN %.0f <= DEF %.0f <= DEM %.0f <= DMM %.0f%s; ",
                  n, dgn, def, dem, dmm, ok ? "" : " [violated]");
    detail += part;
  }
  report(8, "method RMSE ordering DGN <= DEF <= DEM <= DMM (5% slack)", pass, detail);
}

// 9. One-round fusion methods send N-1 messages; iterative methods send
//    2(N-1) per round.
void criterion_9() {
  const Scenario scenario = reference_scenario(5, 0xC9);
  const auto meas = sample_measurements(scenario, mix_seed(0xC9, 1));
  ProtocolOptions opt;
  opt.init = default_init(scenario);
  bool pass = true;
  std::string detail;
  for (Method method : {Method::Def, Method::Dem}) {
    const ProtocolResult res = run_protocol(method, scenario, meas, opt);
    pass = pass && res.cost.messages_total == 4 && res.cost.rounds == 1;
    detail += method_name(method) + ": " + std::to_string(res.cost.messages_total) + " msgs; ";
  }
  for (Method method : {Method::Dmm, Method::Dgn}) {
    ProtocolOptions forced = opt;
    forced.tol = 0.0;
    forced.max_iter = 3;
    const ProtocolResult res = run_protocol(method, scenario, meas, forced);
    pass = pass && res.cost.messages_total == 2 * 4 * 3;
    detail += method_name(method) + ": " + std::to_string(res.cost.messages_total) +
              " msgs in 3 rounds; ";
  }
  report(9, "message counts per protocol round", pass, detail);
}

// 10. Simulated bit counters equal the closed forms over a full sweep.
void criterion_10() {
  int mismatches = 0;
  long checked = 0;
  for (int n = 2; n <= 10; ++n) {
    const Scenario scenario = reference_scenario(n, mix_seed(0xCA, static_cast<std::uint64_t>(n)));
    const auto meas = sample_measurements(scenario, mix_seed(0xCA, 2, static_cast<std::uint64_t>(n)));
    ProtocolOptions opt;
    opt.init = default_init(scenario);
    for (int k = 1; k <= 10; ++k) {
      for (Method method : {Method::Dmm, Method::Dgn}) {
        ProtocolOptions forced = opt;
        forced.tol = 0.0;
        forced.max_iter = k;
        const ProtocolResult res = run_protocol(method, scenario, meas, forced);
        if (res.cost.bits_total !=
            comm_bits_closed_form(method, n, 3, 32, 32, res.cost.rounds)) {
          ++mismatches;
        }
        ++checked;
      }
    }
    for (Method method : {Method::Def, Method::Dem}) {
      const ProtocolResult res = run_protocol(method, scenario, meas, opt);
      if (res.cost.bits_total != comm_bits_closed_form(method, n, 3, 32, 32, 1)) ++mismatches;
      ++checked;
    }
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail), "%d mismatches in %ld runs (N 2..10, k 1..10)",
                mismatches, checked);
  report(10, "bit counters equal the closed forms exactly", mismatches == 0, detail);
}

// 11. Zero-noise consistency: the iterative solvers recover the emitter to
//     sub-meter accuracy on every trial; grid fusion recovers it to within the
//     grid-resolution RMSE bound step * sqrt(dims) / 2.
void criterion_11() {
  double worst_iter = 0.0;
  double def_sq = 0.0, dem_sq = 0.0;
  const double grid_bound = 200.0 * std::sqrt(2.0) / 2.0;
  const int trials = 50;
  for (int trial = 0; trial < trials; ++trial) {
    ScenarioTemplate tmpl;
    tmpl.channel.noise_var = 0.0;
    const Scenario scenario =
        build_scenario(tmpl, mix_seed(0xCB, static_cast<std::uint64_t>(trial)));
    const auto meas = sample_measurements(scenario, 1);
    const Vec3 init = default_init(scenario);

    // Iterative solvers are run to convergence to certify consistency.
    const DmmResult dmm = run_dmm(meas, scenario.aoi, init, 0.05, 500);
    const DgnResult dgn = run_dgn(meas, scenario.aoi, init, 1e-6, 200);
    worst_iter = std::max({worst_iter, (dmm.estimate.position - scenario.emitter).norm(),
                           (dgn.estimate.position - scenario.emitter).norm()});

    ProtocolOptions opt;
    opt.init = init;
    const ProtocolResult def = run_protocol(Method::Def, scenario, meas, opt);
    const ProtocolResult dem = run_protocol(Method::Dem, scenario, meas, opt);
    def_sq += (def.estimate.position - scenario.emitter).squaredNorm();
    dem_sq += (dem.estimate.position - scenario.emitter).squaredNorm();
  }
  const double def_rmse = std::sqrt(def_sq / trials);
  const double dem_rmse = std::sqrt(dem_sq / trials);
  const bool pass = worst_iter <= 1.0 && def_rmse <= grid_bound && dem_rmse <= grid_bound;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "DMM/DGN worst %.3f m (<= 1), DEF rmse %.1f / DEM rmse %.1f m (<= %.1f), %d trials",
                worst_iter, def_rmse, dem_rmse, grid_bound, trials);
  report(11, "zero-noise recovery of the emitter", pass, detail);
}

// 12. No method beats the CRLB by more than the Monte Carlo slack.
void criterion_12() {
  ExperimentConfig config;
  config.methods = {Method::Dmm, Method::Dgn, Method::Def, Method::Dem};
  config.trials = 1000;
  config.seed = 0xCC;
  config.sweep.kind = SweepSpec::Kind::UavCount;
  config.sweep.values = {5.0};
  const RmseTable table = monte_carlo(config);
  bool pass = true;
  std::string detail;
  for (const RmseRow& row : table.rows) {
    const bool ok = row.rmse_m >= 0.9 * row.crlb_root_m;
    pass = pass && ok;
    char part[120];
    std::snprintf(part, sizeof(part), "%s %.0f m vs bound %.0f m%s; ",
                  method_name(row.method).c_str(), row.rmse_m, row.crlb_root_m,
                  ok ? "" : " [below]");
    detail += part;
  }
  report(12, "no RMSE below 0.9 x root-CRLB (1000 trials)", pass, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

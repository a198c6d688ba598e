#include "uavloc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "uavloc/rng.hpp"

namespace uavloc {

namespace {

using nlohmann::json;

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigurationError("expected a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

ChannelParams channel_from_json(const json& j) {
  ChannelParams params;
  params.p0_db = j.value("p0_db", params.p0_db);
  params.d0_m = j.value("d0_m", params.d0_m);
  params.ple = j.value("ple", params.ple);
  params.noise_var = j.value("noise_var", params.noise_var);
  params.validate();
  return params;
}

json channel_to_json(const ChannelParams& p) {
  return json{{"p0_db", p.p0_db}, {"d0_m", p.d0_m}, {"ple", p.ple}, {"noise_var", p.noise_var}};
}

struct Accumulator {
  double err_sq_sum = 0.0;
  long double bits_sum = 0.0;
  long double flops_sum = 0.0;
  int successes = 0;
  int failures = 0;
};

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigurationError("config: trials must be >= 1");
  if (methods.empty()) throw ConfigurationError("config: no methods selected");
  if (sweep.values.empty()) throw ConfigurationError("config: sweep has no values");
  for (double v : sweep.values) {
    if (!(v > 0.0)) throw ConfigurationError("config: sweep values must be positive");
  }
  if (scenario.n_uavs < 2) throw ConfigurationError("config: need at least 2 UAVs");
  if (scenario.samples_per_uav < 1) throw ConfigurationError("config: need at least 1 sample per UAV");
}

Scenario build_scenario(const ScenarioTemplate& tmpl, std::uint64_t seed) {
  if (tmpl.name != "circle") {
    throw ConfigurationError("build_scenario: unknown template '" + tmpl.name + "'");
  }
  if (tmpl.n_uavs < 2) throw ConfigurationError("build_scenario: need at least 2 UAVs");
  if (tmpl.samples_per_uav < 2) {
    throw ConfigurationError("build_scenario: need at least 2 samples per UAV");
  }

  const double side = tmpl.aoi_side_m;
  Scenario scenario;
  scenario.aoi = Aoi{Interval{0.0, side}, Interval{0.0, side}, Interval{0.0, 0.0}};

  const Vec3 center(side / 2.0, side / 2.0, tmpl.altitude_m);
  const int legs = tmpl.samples_per_uav - 1;
  const int bend_after =
      std::clamp(static_cast<int>(std::lround(tmpl.radial_fraction * legs)), 1, legs - 1);

  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> uangle(0.0, 2.0 * std::numbers::pi / tmpl.n_uavs);
  const double fleet_rotation = uangle(rng);
  std::uniform_real_distribution<double> uradius(tmpl.start_radius_m - tmpl.radius_jitter_m,
                                                 tmpl.start_radius_m + tmpl.radius_jitter_m);
  std::uniform_real_distribution<double> ulength(tmpl.track_length_m - tmpl.length_jitter_m,
                                                 tmpl.track_length_m + tmpl.length_jitter_m);

  for (int i = 0; i < tmpl.n_uavs; ++i) {
    const double angle = fleet_rotation + 2.0 * std::numbers::pi * i / tmpl.n_uavs;
    const Vec3 radial(std::cos(angle), std::sin(angle), 0.0);
    const double handedness = (rng() & 1) ? 1.0 : -1.0;
    const Vec3 sideways = handedness * Vec3(-radial.y(), radial.x(), 0.0);
    const double radius = uradius(rng);
    const double leg_duration = ulength(rng) / legs / tmpl.speed_mps;
    const Vec3 start = center + radius * radial;
    const TrajectoryPlan plan =
        make_dogleg_plan(start, -tmpl.speed_mps * radial, tmpl.speed_mps * sideways, bend_after,
                         leg_duration, tmpl.samples_per_uav);
    scenario.uavs.push_back(UavConfig{plan, tmpl.channel});
  }

  std::uniform_real_distribution<double> ux(scenario.aoi.x_range.lo, scenario.aoi.x_range.hi);
  std::uniform_real_distribution<double> uy(scenario.aoi.y_range.lo, scenario.aoi.y_range.hi);
  scenario.emitter = Vec3(ux(rng), uy(rng), scenario.aoi.z_range.lo);
  return scenario;
}

Scenario build_scenario(const std::string& template_name, int n_uavs, int samples_per_uav,
                        std::uint64_t seed) {
  ScenarioTemplate tmpl;
  tmpl.name = template_name;
  tmpl.n_uavs = n_uavs;
  tmpl.samples_per_uav = samples_per_uav;
  return build_scenario(tmpl, seed);
}

Vec3 default_init(const Scenario& scenario) {
  if (scenario.uavs.empty()) throw ConfigurationError("default_init: scenario has no UAVs");
  Vec3 sum = Vec3::Zero();
  for (const UavConfig& uav : scenario.uavs) sum += uav.plan.initial_position();
  return scenario.aoi.clamp(sum / static_cast<double>(scenario.uavs.size()));
}

RmseTable monte_carlo(const ExperimentConfig& config) {
  config.validate();

  std::vector<Method> methods = config.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  RmseTable table;
  for (std::size_t sweep_idx = 0; sweep_idx < config.sweep.values.size(); ++sweep_idx) {
    const double sweep_value = config.sweep.values[sweep_idx];

    ScenarioTemplate tmpl = config.scenario;
    MethodOptions opt = config.options;
    int forced_rounds = 0;
    switch (config.sweep.kind) {
      case SweepSpec::Kind::Rounds:
        forced_rounds = static_cast<int>(std::lround(sweep_value));
        break;
      case SweepSpec::Kind::UavCount:
        tmpl.n_uavs = static_cast<int>(std::lround(sweep_value));
        break;
      case SweepSpec::Kind::GridStep:
        opt.grid_step = sweep_value;
        break;
    }

    std::map<Method, Accumulator> accs;
    long double crlb_sum = 0.0;
    int crlb_count = 0;

    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t trial_seed = mix_seed(config.seed, sweep_idx, static_cast<std::uint64_t>(trial));
      const Scenario scenario = build_scenario(tmpl, mix_seed(trial_seed, 0xE77));
      const std::vector<MeasurementSet> meas =
          sample_measurements(scenario, mix_seed(trial_seed, 0xA01));
      const std::vector<int> dims = scenario.aoi.active_dims();

      const bool zero_noise =
          std::all_of(scenario.uavs.begin(), scenario.uavs.end(),
                      [](const UavConfig& u) { return u.channel.noise_var == 0.0; });
      if (zero_noise) {
        crlb_count += 1;  // infinite information: the bound is zero
      } else {
        try {
          crlb_sum += crlb_trace_subblock(fim_total(scenario, scenario.emitter).total, dims);
          crlb_count += 1;
        } catch (const Error&) {
          // unobservable trial geometry; leave it out of the bound average
        }
      }

      for (Method method : methods) {
        ProtocolOptions popt;
        popt.init = default_init(scenario);
        popt.grid_step = opt.grid_step;
        popt.tau = opt.tau;
        popt.p = opt.p;
        popt.q = opt.q;
        if (method == Method::Dmm) {
          popt.tol = opt.dmm_tol;
          popt.max_iter = opt.dmm_max_iter;
        } else if (method == Method::Dgn) {
          popt.tol = opt.dgn_tol;
          popt.max_iter = opt.dgn_max_iter;
          popt.damping = opt.dgn_damping;
        }
        if (forced_rounds > 0 && (method == Method::Dmm || method == Method::Dgn)) {
          popt.tol = 0.0;
          popt.max_iter = forced_rounds;
        }
        Accumulator& acc = accs[method];
        try {
          const ProtocolResult res = run_protocol(method, scenario, meas, popt);
          acc.err_sq_sum += (res.estimate.position - scenario.emitter).squaredNorm();
          acc.bits_sum += static_cast<long double>(res.cost.bits_total);
          acc.flops_sum += static_cast<long double>(res.cost.flops_total);
          acc.successes += 1;
        } catch (const Error&) {
          acc.failures += 1;
        }
      }
    }

    const double crlb_mean = crlb_count > 0 ? static_cast<double>(crlb_sum / crlb_count) : 0.0;
    for (Method method : methods) {
      const Accumulator& acc = accs[method];
      RmseRow row;
      row.sweep_value = sweep_value;
      row.method = method;
      row.rmse_m = acc.successes > 0 ? std::sqrt(acc.err_sq_sum / acc.successes) : 0.0;
      row.crlb_root_m = std::sqrt(std::max(0.0, crlb_mean));
      row.bits = acc.successes > 0
                     ? static_cast<std::int64_t>(std::llround(acc.bits_sum / acc.successes))
                     : 0;
      row.flops = acc.successes > 0
                      ? static_cast<std::int64_t>(std::llround(acc.flops_sum / acc.successes))
                      : 0;
      row.trials = config.trials;
      row.failures = acc.failures;
      table.rows.push_back(row);
    }
  }
  return table;
}

void emit_csv(const RmseTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_csv: cannot open " + path);
  out.imbue(std::locale::classic());
  out.precision(17);  // values survive a parse round trip exactly
  out << "sweep,method,rmse_m,crlb_root_m,bits,flops,trials,failures\n";
  for (const RmseRow& row : table.rows) {
    out << row.sweep_value << ',' << method_name(row.method) << ',' << row.rmse_m << ','
        << row.crlb_root_m << ',' << row.bits << ',' << row.flops << ',' << row.trials << ','
        << row.failures << '\n';
  }
  if (!out) throw IoError("emit_csv: write failed for " + path);
}

std::string scenario_to_json(const Scenario& scenario) {
  json j;
  j["aoi"] = {{"x", {scenario.aoi.x_range.lo, scenario.aoi.x_range.hi}},
              {"y", {scenario.aoi.y_range.lo, scenario.aoi.y_range.hi}},
              {"z", {scenario.aoi.z_range.lo, scenario.aoi.z_range.hi}}};
  j["emitter"] = vec3_to_json(scenario.emitter);
  j["uavs"] = json::array();
  for (const UavConfig& uav : scenario.uavs) {
    json legs = json::array();
    for (const TrajectoryLeg& leg : uav.plan.legs()) {
      legs.push_back({{"velocity", vec3_to_json(leg.velocity)}, {"duration", leg.duration}});
    }
    j["uavs"].push_back({{"initial_position", vec3_to_json(uav.plan.initial_position())},
                         {"sample_count", uav.plan.sample_count()},
                         {"legs", std::move(legs)},
                         {"channel", channel_to_json(uav.channel)}});
  }
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("scenario JSON parse error: ") + e.what());
  }
  try {
    Scenario scenario;
    const json& aoi = j.at("aoi");
    auto interval = [](const json& arr) { return Interval{arr.at(0), arr.at(1)}; };
    scenario.aoi = Aoi{interval(aoi.at("x")), interval(aoi.at("y")), interval(aoi.at("z"))};
    scenario.emitter = vec3_from_json(j.at("emitter"));
    for (const json& ju : j.at("uavs")) {
      std::vector<TrajectoryLeg> legs;
      for (const json& jl : ju.at("legs")) {
        legs.push_back(TrajectoryLeg{vec3_from_json(jl.at("velocity")), jl.at("duration")});
      }
      TrajectoryPlan plan(vec3_from_json(ju.at("initial_position")), std::move(legs));
      if (ju.contains("sample_count") && ju.at("sample_count").get<int>() != plan.sample_count()) {
        throw ConfigurationError("scenario JSON: sample_count does not match leg count + 1");
      }
      scenario.uavs.push_back(
          UavConfig{std::move(plan), channel_from_json(ju.value("channel", json::object()))});
    }
    return scenario;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("scenario JSON: ") + e.what());
  }
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_scenario: cannot open " + path);
  out << scenario_to_json(scenario) << '\n';
  if (!out) throw IoError("save_scenario: write failed for " + path);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_scenario: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json(buffer.str());
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config JSON parse error: ") + e.what());
  }
  try {
    ExperimentConfig config;
    if (j.contains("scenario")) {
      const json& js = j["scenario"];
      config.scenario.name = js.value("name", config.scenario.name);
      config.scenario.n_uavs = js.value("n_uavs", config.scenario.n_uavs);
      config.scenario.samples_per_uav =
          js.value("samples_per_uav", config.scenario.samples_per_uav);
      config.scenario.aoi_side_m = js.value("aoi_side_m", config.scenario.aoi_side_m);
      config.scenario.altitude_m = js.value("altitude_m", config.scenario.altitude_m);
      config.scenario.start_radius_m = js.value("start_radius_m", config.scenario.start_radius_m);
      config.scenario.radius_jitter_m = js.value("radius_jitter_m", config.scenario.radius_jitter_m);
      config.scenario.track_length_m = js.value("track_length_m", config.scenario.track_length_m);
      config.scenario.length_jitter_m = js.value("length_jitter_m", config.scenario.length_jitter_m);
      config.scenario.radial_fraction = js.value("radial_fraction", config.scenario.radial_fraction);
      config.scenario.speed_mps = js.value("speed_mps", config.scenario.speed_mps);
      if (js.contains("channel")) config.scenario.channel = channel_from_json(js["channel"]);
    }
    if (j.contains("methods")) {
      config.methods.clear();
      for (const json& m : j["methods"]) config.methods.push_back(method_from_name(m));
    }
    config.trials = j.value("trials", config.trials);
    config.seed = j.value("seed", config.seed);
    config.out_path = j.value("out", config.out_path);
    if (j.contains("sweep")) {
      const json& js = j["sweep"];
      const std::string kind = js.value("kind", "uav_count");
      if (kind == "rounds") {
        config.sweep.kind = SweepSpec::Kind::Rounds;
        if (js.contains("k_max")) {
          for (int k = 1; k <= js["k_max"].get<int>(); ++k) {
            config.sweep.values.push_back(static_cast<double>(k));
          }
        }
      } else if (kind == "uav_count") {
        config.sweep.kind = SweepSpec::Kind::UavCount;
      } else if (kind == "grid_step") {
        config.sweep.kind = SweepSpec::Kind::GridStep;
      } else {
        throw ConfigurationError("config: unknown sweep kind '" + kind + "'");
      }
      if (js.contains("values")) {
        for (const json& v : js["values"]) config.sweep.values.push_back(v.get<double>());
      }
    }
    if (config.sweep.values.empty()) {
      config.sweep.kind = SweepSpec::Kind::UavCount;
      config.sweep.values = {static_cast<double>(config.scenario.n_uavs)};
    }
    if (j.contains("options")) {
      const json& jo = j["options"];
      config.options.dmm_tol = jo.value("dmm_tol", config.options.dmm_tol);
      config.options.dmm_max_iter = jo.value("dmm_max_iter", config.options.dmm_max_iter);
      config.options.dgn_tol = jo.value("dgn_tol", config.options.dgn_tol);
      config.options.dgn_max_iter = jo.value("dgn_max_iter", config.options.dgn_max_iter);
      if (jo.contains("dgn_damping")) config.options.dgn_damping = jo["dgn_damping"].get<double>();
      config.options.grid_step = jo.value("grid_step", config.options.grid_step);
      config.options.tau = jo.value("tau", config.options.tau);
      config.options.p = jo.value("p", config.options.p);
      config.options.q = jo.value("q", config.options.q);
    }
    return config;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config JSON: ") + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& config) {
  json j;
  j["scenario"] = {{"name", config.scenario.name},
                   {"n_uavs", config.scenario.n_uavs},
                   {"samples_per_uav", config.scenario.samples_per_uav},
                   {"aoi_side_m", config.scenario.aoi_side_m},
                   {"altitude_m", config.scenario.altitude_m},
                   {"start_radius_m", config.scenario.start_radius_m},
                   {"radius_jitter_m", config.scenario.radius_jitter_m},
                   {"track_length_m", config.scenario.track_length_m},
                   {"length_jitter_m", config.scenario.length_jitter_m},
                   {"radial_fraction", config.scenario.radial_fraction},
                   {"speed_mps", config.scenario.speed_mps},
                   {"channel", channel_to_json(config.scenario.channel)}};
  j["methods"] = json::array();
  for (Method m : config.methods) j["methods"].push_back(method_name(m));
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  const char* kind = config.sweep.kind == SweepSpec::Kind::Rounds      ? "rounds"
                     : config.sweep.kind == SweepSpec::Kind::UavCount ? "uav_count"
                                                                      : "grid_step";
  j["sweep"] = {{"kind", kind}, {"values", config.sweep.values}};
  j["options"] = {{"dmm_tol", config.options.dmm_tol},
                  {"dmm_max_iter", config.options.dmm_max_iter},
                  {"dgn_tol", config.options.dgn_tol},
                  {"dgn_max_iter", config.options.dgn_max_iter},
                  {"grid_step", config.options.grid_step},
                  {"tau", config.options.tau},
                  {"p", config.options.p},
                  {"q", config.options.q}};
  if (config.options.dgn_damping) j["options"]["dgn_damping"] = *config.options.dgn_damping;
  if (!config.out_path.empty()) j["out"] = config.out_path;
  return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

}  // namespace uavloc

#include "uavloc/simnet.hpp"

#include <cmath>
#include <fstream>

namespace uavloc {

namespace {

struct PayloadShape {
  int position_values = 0;
  int weight_values = 0;
};

PayloadShape payload_shape(PayloadKind kind, int tau) {
  switch (kind) {
    case PayloadKind::Iterate: return {tau, 0};
    case PayloadKind::Gradient: return {tau, 0};
    case PayloadKind::Matrix: return {0, tau * tau};
    case PayloadKind::ScalarWeight: return {0, 1};
    case PayloadKind::EstimateInfo: return {tau, tau * tau};
    case PayloadKind::EstimateScalar: return {tau, 1};
  }
  throw ContractViolationError("payload_shape: unknown payload kind");
}

class MessageLog {
public:
  MessageLog(std::vector<Message>& sink, CostReport& cost, int tau, int p, int q)
      : sink_(sink), cost_(cost), tau_(tau), p_(p), q_(q) {}

  void send(int from, int to, int round, PayloadKind kind) {
    const Message msg = make_message(from, to, round, kind, tau_, p_, q_);
    if (!cost_.per_round.empty() && cost_.per_round.back().round > round) {
      throw ContractViolationError("message log: rounds must be non-decreasing");
    }
    if (cost_.per_round.empty() || cost_.per_round.back().round != round) {
      cost_.per_round.push_back(RoundCost{round, 0, 0});
    }
    cost_.per_round.back().bits += msg.bit_size;
    cost_.per_round.back().messages += 1;
    cost_.bits_total += msg.bit_size;
    cost_.messages_total += 1;
    sink_.push_back(msg);
  }

private:
  std::vector<Message>& sink_;
  CostReport& cost_;
  int tau_, p_, q_;
};

}  // namespace

Message make_message(int from, int to, int round, PayloadKind kind, int tau, int p, int q) {
  const PayloadShape shape = payload_shape(kind, tau);
  Message msg;
  msg.from = from;
  msg.to = to;
  msg.round = round;
  msg.kind = kind;
  msg.position_values = shape.position_values;
  msg.weight_values = shape.weight_values;
  msg.bit_size = static_cast<std::int64_t>(shape.position_values) * p +
                 static_cast<std::int64_t>(shape.weight_values) * q;
  return msg;
}

ProtocolResult run_protocol(Method method, const Scenario& scenario,
                            std::span<const MeasurementSet> meas, const ProtocolOptions& options) {
  const int n = static_cast<int>(meas.size());
  if (n < 2) throw ConfigurationError("run_protocol: need at least 2 UAVs (one center, one edge)");
  if (options.tau < 1 || options.p < 1 || options.q < 1) {
    throw ConfigurationError("run_protocol: tau, p, q must be positive");
  }

  ProtocolResult result;
  result.cost.method = method;
  MessageLog log(result.messages, result.cost, options.tau, options.p, options.q);
  const std::vector<int> dims = scenario.aoi.active_dims();

  switch (method) {
    case Method::Dmm: {
      const auto observer = [&](int round, std::span<const Vec3>, const Vec3&) {
        for (int edge = 2; edge <= n; ++edge) {
          log.send(1, edge, round, PayloadKind::Iterate);   // s_c broadcast down
          log.send(edge, 1, round, PayloadKind::Iterate);   // local iterate up
        }
        result.cost.rounds = round;
      };
      const DmmResult dmm =
          run_dmm(meas, scenario.aoi, options.init, options.tol, options.max_iter, observer);
      result.estimate = dmm.estimate;
      break;
    }
    case Method::Dgn: {
      const auto observer = [&](int round, const Vec3&) {
        for (int edge = 2; edge <= n; ++edge) {
          log.send(1, edge, round, PayloadKind::Iterate);       // s broadcast down
          log.send(edge, 1, round, PayloadKind::EstimateInfo);  // J^T r and J^T J up
        }
        result.cost.rounds = round;
      };
      const DgnResult dgn = run_dgn(meas, scenario.aoi, options.init, options.tol,
                                    options.max_iter, options.damping, observer);
      result.estimate = dgn.estimate;
      break;
    }
    case Method::Def:
    case Method::Dem:
    case Method::Avg: {
      std::vector<PositionEstimate> locals;
      locals.reserve(static_cast<std::size_t>(n));
      for (const MeasurementSet& set : meas) {
        locals.push_back(grid_search_local(set, scenario.aoi, options.grid_step));
      }
      const PayloadKind kind = method == Method::Def   ? PayloadKind::EstimateInfo
                               : method == Method::Dem ? PayloadKind::EstimateScalar
                                                       : PayloadKind::Iterate;
      for (int edge = 2; edge <= n; ++edge) log.send(edge, 1, 1, kind);
      result.cost.rounds = 1;
      if (method == Method::Def) {
        try {
          result.estimate = def_fuse(locals, dims);
        } catch (const RankDeficientFusionError&) {
          result.estimate = avg_fuse(locals);
          result.estimate.source = Method::Def;
          result.def_fell_back_to_avg = true;
        }
      } else if (method == Method::Dem) {
        result.estimate = dem_fuse(locals, dims);
      } else {
        result.estimate = avg_fuse(locals);
      }
      break;
    }
  }

  int total_samples = 0;
  for (const MeasurementSet& set : meas) total_samples += set.sample_count();
  result.cost.flops_total =
      flops_closed_form(method, options.tau, total_samples, result.cost.rounds,
                        grid_node_count(scenario.aoi, options.grid_step));
  return result;
}

std::int64_t comm_bits_closed_form(Method method, int n_uavs, int tau, int p, int q, int k) {
  if (n_uavs < 2 || tau < 1 || p < 1 || q < 1 || k < 1) {
    throw ContractViolationError("comm_bits_closed_form: arguments must be positive (N >= 2)");
  }
  const std::int64_t edges = n_uavs - 1;
  const std::int64_t tp = static_cast<std::int64_t>(tau) * p;
  const std::int64_t ttq = static_cast<std::int64_t>(tau) * tau * q;
  switch (method) {
    case Method::Dmm: return 2 * edges * tp * k;
    case Method::Dgn: return edges * (2 * tp + ttq) * k;
    case Method::Def: return edges * (tp + ttq);
    case Method::Dem: return edges * (tp + q);
    case Method::Avg: return edges * tp;
  }
  throw ContractViolationError("comm_bits_closed_form: unknown method tag");
}

std::int64_t flops_closed_form(Method method, int tau, int total_samples, int k,
                               std::int64_t grid_nodes) {
  if (tau < 1 || total_samples < 1) {
    throw ContractViolationError("flops_closed_form: arguments must be positive");
  }
  const std::int64_t m = total_samples;
  switch (method) {
    case Method::Dmm: return 3ll * tau * m * k;
    case Method::Dgn: return (5ll * tau * tau + 5ll * tau) * m * k;
    case Method::Def:
    case Method::Dem:
    case Method::Avg: return 3ll * tau * m * grid_nodes;
  }
  throw ContractViolationError("flops_closed_form: unknown method tag");
}

std::int64_t grid_node_count(const Aoi& aoi, double step_m) {
  if (!(step_m > 0.0)) throw ContractViolationError("grid_node_count: step must be positive");
  std::int64_t nodes = 1;
  for (const Interval& range : {aoi.x_range, aoi.y_range, aoi.z_range}) {
    if (!range.degenerate()) {
      nodes *= std::max<std::int64_t>(
          1, static_cast<std::int64_t>(std::ceil(range.length() / step_m - 1e-12)));
    }
  }
  return nodes;
}

void write_cost_csv(std::span<const CostReport> reports, int n_uavs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_cost_csv: cannot open " + path);
  out.imbue(std::locale::classic());
  out << "method,N,rounds,bits_total,flops_total\n";
  for (const CostReport& report : reports) {
    out << method_name(report.method) << ',' << n_uavs << ',' << report.rounds << ','
        << report.bits_total << ',' << report.flops_total << '\n';
  }
  if (!out) throw IoError("write_cost_csv: write failed for " + path);
}

}  // namespace uavloc

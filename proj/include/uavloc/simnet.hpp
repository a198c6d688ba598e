#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uavloc/crlb.hpp"
#include "uavloc/estimators.hpp"

namespace uavloc {

/// What a message carries; bit size follows from the kind and (tau, p, q).
enum class PayloadKind {
  Iterate,         // tau position values
  Gradient,        // tau position values
  Matrix,          // tau^2 weight values
  ScalarWeight,    // 1 weight value
  EstimateInfo,    // tau position + tau^2 weight values
  EstimateScalar,  // tau position + 1 weight value
};

struct Message {
  int from = 0;  // UAV id, 1 = center
  int to = 0;
  int round = 0;
  PayloadKind kind = PayloadKind::Iterate;
  int position_values = 0;
  int weight_values = 0;
  std::int64_t bit_size = 0;
};

Message make_message(int from, int to, int round, PayloadKind kind, int tau, int p, int q);

struct RoundCost {
  int round = 0;
  std::int64_t bits = 0;
  int messages = 0;
};

/// Communication and computation ledger of one protocol run.
struct CostReport {
  Method method = Method::Dmm;
  int rounds = 0;
  std::int64_t bits_total = 0;
  std::int64_t flops_total = 0;
  std::vector<RoundCost> per_round;
  int messages_total = 0;
};

struct ProtocolOptions {
  Vec3 init = Vec3::Zero();               // DMM / DGN starting point
  double tol = 1.0;                       // meters; 0 forces exactly max_iter rounds
  int max_iter = 50;
  std::optional<double> damping;          // DGN; empty = automatic
  double grid_step = 200.0;               // DEF / DEM / AVG local search
  int tau = 3;                            // position vector dimension in accounting
  int p = 32;                             // bits per position value
  int q = 32;                             // bits per weight value
};

struct ProtocolResult {
  PositionEstimate estimate;
  CostReport cost;
  std::vector<Message> messages;
  bool def_fell_back_to_avg = false;
};

/// Execute one method as explicit center/edge message rounds over the given
/// measurements. UAV 1 is the center; its own computation crosses no link.
/// The returned estimate is identical to calling the estimators directly.
ProtocolResult run_protocol(Method method, const Scenario& scenario,
                            std::span<const MeasurementSet> meas, const ProtocolOptions& options);

/// Total transmitted bits of a full run from the closed-form accounting.
/// k is the realized round count for the iterative methods.
std::int64_t comm_bits_closed_form(Method method, int n_uavs, int tau, int p, int q, int k);

/// Closed-form floating-point operation count; grid_nodes is the number of
/// local-search nodes for the one-round fusion methods.
std::int64_t flops_closed_form(Method method, int tau, int total_samples, int k,
                               std::int64_t grid_nodes);

/// Number of local-search grid nodes the AOI yields at the given step.
std::int64_t grid_node_count(const Aoi& aoi, double step_m);

/// CSV with columns method,N,rounds,bits_total,flops_total.
void write_cost_csv(std::span<const CostReport> reports, int n_uavs, const std::string& path);

}  // namespace uavloc

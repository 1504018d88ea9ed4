#pragma once

#include <cstdint>
#include <string_view>

namespace dualtable {

enum class Plan : std::uint8_t { kEdit, kOverwrite };
enum class OpKind : std::uint8_t { kUpdate, kDelete };

std::string_view to_string(Plan plan);
std::string_view to_string(OpKind op);

// Throughput of each store in bytes per second, plus the two workload
// constants of the model: the number of full-table reads expected after a
// modification and the encoded size of one delete marker.
//
// Costs are linear in volume: reading or writing D bytes on a store costs
// D / rate seconds.
struct CostParams {
  double master_write_rate = 0;    // W_M
  double master_read_rate = 0;     // R_M (no default; must be configured)
  double attached_write_rate = 0;  // W_A
  double attached_read_rate = 0;   // R_A
  double successive_reads_k = 10;
  double marker_size = 9;

  // Throws UserError unless every rate is positive, k >= 0 and marker > 0.
  void validate() const;
  bool valid() const noexcept;

  bool operator==(const CostParams&) const = default;
};

struct PlanCosts {
  double overwrite_s = 0;
  double edit_s = 0;
};

struct PlanDecision {
  Plan plan = Plan::kOverwrite;
  // Cost(OVERWRITE) - Cost(EDIT). EDIT is chosen only when strictly positive.
  double cost_margin_seconds = 0;
  double ratio_used = 0;
};

// Update margin for a table of `data_size` bytes when a fraction `alpha` of
// its data is rewritten:  D/W_M - alpha * (D/W_A + k * D/R_A).
double cost_update(double data_size, double alpha, const CostParams& p);

// Delete margin when a fraction `beta` of rows (average row size
// `avg_row_size`) is removed:
//   D/W_M - beta * (D/W_M + k*D/R_M + (m/d)*D/W_A + k*(m/d)*D/R_A).
double cost_delete(double data_size, double beta, double avg_row_size, const CostParams& p);

// Per-plan totals (modification cost + k following full reads) whose
// difference is cost_update / cost_delete.
PlanCosts plan_costs_update(double data_size, double alpha, const CostParams& p);
PlanCosts plan_costs_delete(double data_size, double beta, double avg_row_size,
                            const CostParams& p);

struct TableStats;

PlanDecision choose_plan(OpKind op, const TableStats& stats, double ratio, const CostParams& p);

// Ratio where the margin crosses zero, clamped to [0, 1].
double crossover_update(const CostParams& p);
double crossover_delete(double avg_row_size, const CostParams& p);

}  // namespace dualtable

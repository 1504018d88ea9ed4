#include "dualtable/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dualtable/catalog.hpp"
#include "dualtable/error.hpp"

namespace dualtable {

std::string_view to_string(Plan plan) { return plan == Plan::kEdit ? "EDIT" : "OVERWRITE"; }

std::string_view to_string(OpKind op) { return op == OpKind::kUpdate ? "update" : "delete"; }

bool CostParams::valid() const noexcept {
  auto positive = [](double v) { return std::isfinite(v) && v > 0; };
  return positive(master_write_rate) && positive(master_read_rate) &&
         positive(attached_write_rate) && positive(attached_read_rate) &&
         std::isfinite(successive_reads_k) && successive_reads_k >= 0 && positive(marker_size);
}

void CostParams::validate() const {
  if (!valid()) {
    throw UserError(
        "cost parameters not configured or invalid: W_M, R_M, W_A, R_A must be positive, "
        "k >= 0, marker size > 0");
  }
}

namespace {

void check_ratio(double r, const char* name) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw UserError(std::string(name) + " must be in [0, 1], got " + std::to_string(r));
  }
}

void check_size(double d) {
  if (!(d >= 0.0) || !std::isfinite(d)) {
    throw UserError("data size must be a non-negative number");
  }
}

}  // namespace

PlanCosts plan_costs_update(double data_size, double alpha, const CostParams& p) {
  p.validate();
  check_size(data_size);
  check_ratio(alpha, "update ratio");
  const double D = data_size;
  const double k = p.successive_reads_k;
  PlanCosts c;
  c.overwrite_s = D / p.master_write_rate + k * D / p.master_read_rate;
  c.edit_s = alpha * D / p.attached_write_rate +
             k * (alpha * D / p.attached_read_rate + D / p.master_read_rate);
  return c;
}

PlanCosts plan_costs_delete(double data_size, double beta, double avg_row_size,
                            const CostParams& p) {
  p.validate();
  check_size(data_size);
  check_ratio(beta, "delete ratio");
  if (!(avg_row_size > 0)) {
    throw UserError("average row size must be positive");
  }
  const double D = data_size;
  const double k = p.successive_reads_k;
  const double marker_bytes = beta * D / avg_row_size * p.marker_size;
  PlanCosts c;
  c.overwrite_s = (1 - beta) * D / p.master_write_rate + k * (1 - beta) * D / p.master_read_rate;
  c.edit_s = marker_bytes / p.attached_write_rate +
             k * (marker_bytes / p.attached_read_rate + D / p.master_read_rate);
  return c;
}

double cost_update(double data_size, double alpha, const CostParams& p) {
  p.validate();
  check_size(data_size);
  check_ratio(alpha, "update ratio");
  const double D = data_size;
  return D / p.master_write_rate -
         alpha * (D / p.attached_write_rate + p.successive_reads_k * D / p.attached_read_rate);
}

double cost_delete(double data_size, double beta, double avg_row_size, const CostParams& p) {
  p.validate();
  check_size(data_size);
  check_ratio(beta, "delete ratio");
  if (!(avg_row_size > 0)) {
    throw UserError("average row size must be positive");
  }
  const double D = data_size;
  const double k = p.successive_reads_k;
  const double md = p.marker_size / avg_row_size;
  return D / p.master_write_rate -
         beta * (D / p.master_write_rate + k * D / p.master_read_rate +
                 md * D / p.attached_write_rate + k * md * D / p.attached_read_rate);
}

PlanDecision choose_plan(OpKind op, const TableStats& stats, double ratio, const CostParams& p) {
  const double D = static_cast<double>(stats.data_size);
  PlanDecision d;
  d.ratio_used = ratio;
  if (op == OpKind::kUpdate) {
    d.cost_margin_seconds = cost_update(D, ratio, p);
  } else {
    // An empty table has no row size; any positive d gives a zero margin.
    const double row = stats.avg_row_size > 0 ? stats.avg_row_size : 1.0;
    d.cost_margin_seconds = cost_delete(D, ratio, row, p);
  }
  d.plan = d.cost_margin_seconds > 0 ? Plan::kEdit : Plan::kOverwrite;
  return d;
}

double crossover_update(const CostParams& p) {
  p.validate();
  const double x = (1 / p.master_write_rate) /
                   (1 / p.attached_write_rate + p.successive_reads_k / p.attached_read_rate);
  return std::clamp(x, 0.0, 1.0);
}

double crossover_delete(double avg_row_size, const CostParams& p) {
  p.validate();
  if (!(avg_row_size > 0)) {
    throw UserError("average row size must be positive");
  }
  const double k = p.successive_reads_k;
  const double md = p.marker_size / avg_row_size;
  const double x = (1 / p.master_write_rate) /
                   (1 / p.master_write_rate + k / p.master_read_rate + md / p.attached_write_rate +
                    k * md / p.attached_read_rate);
  return std::clamp(x, 0.0, 1.0);
}

}  // namespace dualtable

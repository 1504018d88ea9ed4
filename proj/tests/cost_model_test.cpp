#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dualtable/catalog.hpp"
#include "dualtable/cost_model.hpp"
#include "dualtable/error.hpp"

using namespace dualtable;

namespace {

constexpr double kGB = 1e9;

CostParams example_params(double k = 30) {
  CostParams p;
  p.master_write_rate = 1 * kGB;
  p.master_read_rate = 2 * kGB;
  p.attached_write_rate = 0.8 * kGB;
  p.attached_read_rate = 0.5 * kGB;
  p.successive_reads_k = k;
  p.marker_size = 9;
  return p;
}

void expect_rel(double actual, double expected, double tol = 1e-9) {
  EXPECT_LE(std::abs(actual - expected), tol * std::max(1.0, std::abs(expected)))
      << actual << " vs " << expected;
}

}  // namespace

TEST(CostModel, UpdateWorkedExample) {
  // 100 - 0.01 * (100/0.8 + 30 * 100/0.5)
  expect_rel(cost_update(100 * kGB, 0.01, example_params()), 38.75);
}

TEST(CostModel, UpdateEdgeRatios) {
  auto p = example_params();
  expect_rel(cost_update(100 * kGB, 0.0, p), 100.0);
  p.successive_reads_k = 0;
  expect_rel(cost_update(100 * kGB, 1.0, p), 100.0 - 125.0);
}

TEST(CostModel, DeleteExamples) {
  // m/d = 0.1 with a 9-byte marker means d = 90.
  const auto p = example_params();
  expect_rel(cost_delete(100 * kGB, 0.01, 90, p), 100 - 0.01 * (100 + 1500 + 12.5 + 600));
  expect_rel(cost_delete(100 * kGB, 0.01, 90, p), 77.875);
  expect_rel(cost_delete(100 * kGB, 1.0, 90, p), -2112.5);
  expect_rel(cost_delete(100 * kGB, 0.0, 90, p), 100.0);
}

TEST(CostModel, PlanCostsDifferenceIsMargin) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> rate(1e6, 1e10);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int i = 0; i < 1000; ++i) {
    CostParams p;
    p.master_write_rate = rate(rng);
    p.master_read_rate = rate(rng);
    p.attached_write_rate = rate(rng);
    p.attached_read_rate = rate(rng);
    p.successive_reads_k = std::floor(unit(rng) * 50);
    const double d = 1e3 + unit(rng) * 1e12;
    const double r = unit(rng);
    const double row = 10 + unit(rng) * 1000;
    auto u = plan_costs_update(d, r, p);
    expect_rel(u.overwrite_s - u.edit_s, cost_update(d, r, p), 1e-9);
    auto del = plan_costs_delete(d, r, row, p);
    expect_rel(del.overwrite_s - del.edit_s, cost_delete(d, r, row, p), 1e-9);
  }
}

TEST(CostModel, ChoosePlanFollowsSign) {
  TableStats stats;
  stats.data_size = static_cast<std::uint64_t>(100 * kGB);
  stats.row_count = stats.data_size / 90;
  stats.avg_row_size = 90;
  auto d = choose_plan(OpKind::kUpdate, stats, 0.01, example_params());
  EXPECT_EQ(d.plan, Plan::kEdit);
  expect_rel(d.cost_margin_seconds, 38.75);
  EXPECT_EQ(d.ratio_used, 0.01);
  EXPECT_EQ(choose_plan(OpKind::kUpdate, stats, 0.5, example_params()).plan, Plan::kOverwrite);
  EXPECT_EQ(choose_plan(OpKind::kDelete, stats, 0.01, example_params()).plan, Plan::kEdit);
  EXPECT_EQ(choose_plan(OpKind::kDelete, stats, 1.0, example_params()).plan, Plan::kOverwrite);
}

TEST(CostModel, TieGoesToOverwrite) {
  CostParams p;
  p.master_write_rate = p.master_read_rate = p.attached_write_rate = p.attached_read_rate = 1;
  p.successive_reads_k = 0;
  TableStats stats;
  stats.data_size = 1000;
  EXPECT_EQ(cost_update(1000, 1.0, p), 0.0);
  EXPECT_EQ(choose_plan(OpKind::kUpdate, stats, 1.0, p).plan, Plan::kOverwrite);
}

TEST(CostModel, UpdateCrossoverClosedForm) {
  const auto p = example_params();
  const double expected = (1 / p.master_write_rate) /
                          (1 / p.attached_write_rate + 30 / p.attached_read_rate);
  expect_rel(crossover_update(p), expected);
  EXPECT_NEAR(crossover_update(p), 0.016327, 1e-6);
  expect_rel(cost_update(100 * kGB, crossover_update(p), p) + 1.0, 1.0, 1e-9);
}

TEST(CostModel, UpdateSweepFlipsOnce) {
  const auto p = example_params();
  const double star = crossover_update(p);
  int flips = 0;
  Plan prev = Plan::kEdit;
  TableStats stats;
  stats.data_size = static_cast<std::uint64_t>(100 * kGB);
  for (int i = 0; i <= 100; ++i) {
    const double a = i / 100.0;
    const Plan plan = choose_plan(OpKind::kUpdate, stats, a, p).plan;
    if (i > 0 && plan != prev) {
      ++flips;
      EXPECT_LT((i - 1) / 100.0, star);
      EXPECT_GE(a, star);
    }
    prev = plan;
  }
  EXPECT_EQ(flips, 1);
}

TEST(CostModel, DeleteCrossoverClosedForm) {
  const auto p = example_params();
  const double md = 9.0 / 90;
  const double expected = (1 / p.master_write_rate) /
                          (1 / p.master_write_rate + 30 / p.master_read_rate +
                           md / p.attached_write_rate + 30 * md / p.attached_read_rate);
  expect_rel(crossover_delete(90, p), expected);
  expect_rel(cost_delete(100 * kGB, expected, 90, p) + 1.0, 1.0, 1e-9);
}

TEST(CostModel, CrossoversVanishAsKGrows) {
  double prev_u = 1;
  double prev_d = 1;
  for (double k : {0.0, 1.0, 10.0, 1e3, 1e6, 1e9}) {
    const auto p = example_params(k);
    EXPECT_LE(crossover_update(p), prev_u);
    EXPECT_LE(crossover_delete(90, p), prev_d);
    prev_u = crossover_update(p);
    prev_d = crossover_delete(90, p);
  }
  EXPECT_LT(prev_u, 1e-8);
  EXPECT_LT(prev_d, 1e-8);
}

TEST(CostModel, CrossoverClampedToUnitInterval) {
  CostParams p = example_params(0);
  p.attached_write_rate = 1e15;  // EDIT is nearly free
  EXPECT_EQ(crossover_update(p), 1.0);
}

TEST(CostModel, ValidationRejectsBadInput) {
  CostParams p;
  EXPECT_FALSE(p.valid());
  EXPECT_THROW(p.validate(), UserError);
  p = example_params();
  p.successive_reads_k = -1;
  EXPECT_THROW(p.validate(), UserError);
  EXPECT_THROW(cost_update(1, 1.5, example_params()), UserError);
  EXPECT_THROW(cost_delete(1, -0.1, 10, example_params()), UserError);
  EXPECT_EQ(to_string(Plan::kEdit), "EDIT");
  EXPECT_EQ(to_string(Plan::kOverwrite), "OVERWRITE");
}

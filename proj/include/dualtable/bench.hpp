#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dualtable/cost_model.hpp"
#include "dualtable/io.hpp"

namespace dualtable {

// Ratio sweep over one DML kind. The table has a selector column `sel`
// (a seeded permutation of 0..rows-1) and cols-1 int64 payload columns.
// UPDATE rewrites every payload column of the rows with sel < n, where n is
// chosen so the patched bytes are `ratio` of the table; DELETE removes the
// rows with sel < ratio * rows.
struct BenchSpec {
  OpKind op = OpKind::kUpdate;
  std::uint64_t rows = 10000;
  std::uint32_t cols = 8;
  std::vector<double> grid;
  std::uint32_t k = 3;
  CostParams params;
  std::uint32_t repetitions = 1;
  std::uint64_t seed = 42;
  std::uint64_t segment_target_bytes = 64ULL << 20;
  fs::path work_dir;

  void validate() const;
};

struct BenchRow {
  double ratio = 0;
  std::string series;  // edit | overwrite | model
  Plan plan = Plan::kEdit;
  double model_cost_s = 0;
  double oracle_cost_s = 0;
  // DML writes plus the k following full-table reads.
  ByteCounts bytes;
  double wall_s = 0;
  std::uint64_t rows_matched = 0;
  double ratio_observed = 0;
  std::uint64_t data_size = 0;
  double avg_row_size = 0;
  std::uint32_t repetition = 0;
};

// Σ bytes / rate over the four store directions.
double oracle_cost(const ByteCounts& bytes, const CostParams& p);

std::vector<BenchRow> bench_sweep(const BenchSpec& spec);

inline constexpr std::string_view kBenchCsvHeader =
    "ratio,series,plan,model_cost_s,oracle_cost_s,master_read,master_written,"
    "attached_read,attached_written,wall_s";

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

// Writes and reads probe data through each store and reports throughput.
CostParams calibrate(const fs::path& dir, std::uint64_t probe_bytes = 64ULL << 20);

}  // namespace dualtable

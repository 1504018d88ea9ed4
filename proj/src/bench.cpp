#include "dualtable/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "dualtable/attached_store.hpp"
#include "dualtable/csv.hpp"
#include "dualtable/engine.hpp"
#include "dualtable/error.hpp"
#include "dualtable/master_store.hpp"

namespace dualtable {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr std::string_view kTable = "bench";

Schema bench_schema(std::uint32_t cols) {
  Schema s;
  s.columns.push_back({"sel", ColumnType::kInt64});
  for (std::uint32_t i = 1; i < cols; ++i) {
    s.columns.push_back({"c" + std::to_string(i), ColumnType::kInt64});
  }
  return s;
}

EngineOptions engine_options(const BenchSpec& spec) {
  EngineOptions o;
  o.cost_params = spec.params;
  o.cost_params->successive_reads_k = spec.k;
  o.k_default = spec.k;
  o.segment_target_bytes = spec.segment_target_bytes;
  o.audit_log = false;
  return o;
}

void build_base(const BenchSpec& spec, const fs::path& dir, std::uint64_t seed) {
  Engine engine(dir, engine_options(spec));
  Statement create;
  create.kind = StatementKind::kCreate;
  create.table = std::string(kTable);
  create.schema = bench_schema(spec.cols);
  engine.execute(create);

  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> sel(spec.rows);
  std::iota(sel.begin(), sel.end(), std::int64_t{0});
  std::shuffle(sel.begin(), sel.end(), rng);
  std::uniform_int_distribution<std::int64_t> payload(0, std::int64_t{1} << 40);

  Statement insert;
  insert.kind = StatementKind::kInsert;
  insert.table = std::string(kTable);
  insert.tuples.reserve(spec.rows);
  for (std::uint64_t r = 0; r < spec.rows; ++r) {
    Row row;
    row.reserve(spec.cols);
    row.emplace_back(sel[r]);
    for (std::uint32_t c = 1; c < spec.cols; ++c) row.emplace_back(payload(rng));
    insert.tuples.push_back(std::move(row));
  }
  engine.execute(insert);
}

Statement workload(const BenchSpec& spec, double ratio, const TableStats& stats) {
  Statement stmt;
  stmt.table = std::string(kTable);
  std::int64_t limit = 0;
  if (spec.op == OpKind::kUpdate) {
    stmt.kind = StatementKind::kUpdate;
    PatchMap cells;
    for (std::uint32_t c = 1; c < spec.cols; ++c) {
      const std::string name = "c" + std::to_string(c);
      cells.emplace(static_cast<std::uint16_t>(c), std::int64_t{0});
      stmt.assignments.push_back(
          {name, Expr::binary(ArithOp::kAdd, Expr::column(name), Expr::literal(std::int64_t{1}))});
    }
    // Matched rows such that the patched bytes make up `ratio` of the table.
    const double per_row = static_cast<double>(patch_entry_size(cells));
    limit = static_cast<std::int64_t>(
        std::llround(ratio * static_cast<double>(stats.data_size) / per_row));
  } else {
    stmt.kind = StatementKind::kDelete;
    limit = static_cast<std::int64_t>(std::llround(ratio * static_cast<double>(spec.rows)));
  }
  limit = std::clamp<std::int64_t>(limit, 0, static_cast<std::int64_t>(spec.rows));
  stmt.where = Predicate{{{Comparison{CompareOp::kLt, Expr::column("sel"),
                                      Expr::literal(limit)}}}};
  stmt.options.ratio = ratio;
  stmt.options.k = spec.k;
  return stmt;
}

void copy_dir(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  fs::remove_all(to, ec);
  fs::copy(from, to, fs::copy_options::recursive);
}

}  // namespace

void BenchSpec::validate() const {
  if (rows == 0) throw UserError("bench: rows must be positive");
  if (cols < 2) throw UserError("bench: at least 2 columns are needed");
  if (cols > 65535) throw UserError("bench: too many columns");
  if (grid.empty()) throw UserError("bench: empty ratio grid");
  for (double r : grid) {
    if (!(r >= 0 && r <= 1)) throw UserError("bench: grid ratios must be in [0, 1]");
  }
  if (repetitions == 0) throw UserError("bench: repetitions must be at least 1");
  if (segment_target_bytes == 0) throw UserError("bench: segment target must be positive");
  if (work_dir.empty()) throw UserError("bench: work directory not set");
  params.validate();
}

double oracle_cost(const ByteCounts& b, const CostParams& p) {
  return static_cast<double>(b.master_written) / p.master_write_rate +
         static_cast<double>(b.master_read) / p.master_read_rate +
         static_cast<double>(b.attached_written) / p.attached_write_rate +
         static_cast<double>(b.attached_read) / p.attached_read_rate;
}

std::vector<BenchRow> bench_sweep(const BenchSpec& spec) {
  spec.validate();
  CostParams params = spec.params;
  params.successive_reads_k = spec.k;
  params.marker_size = static_cast<double>(kMarkerSize);

  std::vector<BenchRow> out;
  fs::create_directories(spec.work_dir);
  for (std::uint32_t rep = 0; rep < spec.repetitions; ++rep) {
    const fs::path base = spec.work_dir / ("base" + std::to_string(rep));
    std::error_code ec;
    fs::remove_all(base, ec);
    build_base(spec, base, spec.seed + rep);

    for (double ratio : spec.grid) {
      for (std::string_view series : {"edit", "overwrite", "model"}) {
        const fs::path dir = spec.work_dir / "run";
        copy_dir(base, dir);
        Engine engine(dir, engine_options(spec));
        const TableStats stats = engine.stats(kTable);

        Statement stmt = workload(spec, ratio, stats);
        if (series == "edit") stmt.options.plan = Plan::kEdit;
        if (series == "overwrite") stmt.options.plan = Plan::kOverwrite;

        const auto start = Clock::now();
        auto report = engine.execute(stmt).report;
        // The read pass that finds matching rows is charged to neither plan.
        ByteCounts bytes;
        bytes.master_written = report.bytes.master_written;
        bytes.attached_written = report.bytes.attached_written;
        const auto before_reads = engine.counters();
        Statement scan;
        scan.kind = StatementKind::kSelect;
        scan.table = std::string(kTable);
        for (std::uint32_t i = 0; i < spec.k; ++i) {
          auto cursor = engine.select(scan);
          while (cursor.next()) {
          }
        }
        const auto reads = engine.counters() - before_reads;
        bytes.master_read = reads.master_read;
        bytes.attached_read = reads.attached_read;
        bytes.attached_entries_read = reads.attached_entries_read;

        BenchRow row;
        row.ratio = ratio;
        row.series = std::string(series);
        row.plan = *report.plan_used;
        const PlanCosts costs =
            spec.op == OpKind::kUpdate
                ? plan_costs_update(static_cast<double>(stats.data_size), ratio, params)
                : plan_costs_delete(static_cast<double>(stats.data_size), ratio,
                                    stats.avg_row_size, params);
        row.model_cost_s = row.plan == Plan::kEdit ? costs.edit_s : costs.overwrite_s;
        row.oracle_cost_s = oracle_cost(bytes, params);
        row.bytes = bytes;
        row.wall_s = seconds_since(start);
        row.rows_matched = report.rows_matched;
        row.ratio_observed = report.ratio_observed;
        row.data_size = stats.data_size;
        row.avg_row_size = stats.avg_row_size;
        row.repetition = rep;
        out.push_back(std::move(row));
      }
    }
    fs::remove_all(base, ec);
    fs::remove_all(spec.work_dir / "run", ec);
  }
  return out;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) {
    write_csv_row(out, std::vector<std::string>{
                           format_value(r.ratio), r.series, std::string(to_string(r.plan)),
                           format_value(r.model_cost_s), format_value(r.oracle_cost_s),
                           std::to_string(r.bytes.master_read),
                           std::to_string(r.bytes.master_written),
                           std::to_string(r.bytes.attached_read),
                           std::to_string(r.bytes.attached_written), format_value(r.wall_s)});
  }
}

CostParams calibrate(const fs::path& dir, std::uint64_t probe_bytes) {
  if (probe_bytes == 0) throw UserError("calibrate: probe size must be positive");
  fs::create_directories(dir);
  IoCounters counters;
  Schema schema;
  schema.columns = {{"v", ColumnType::kInt64}, {"pad", ColumnType::kUtf8}};
  const std::string pad(200, 'x');
  const std::uint64_t rows = std::max<std::uint64_t>(1, probe_bytes / (1 + 12 + 4 + pad.size()));
  auto rate = [](std::uint64_t bytes, double secs) {
    return static_cast<double>(bytes) / std::max(secs, 1e-6);
  };

  CostParams p;
  std::uint32_t next_id = 0;
  std::vector<SegmentHandle> segments;
  {
    auto start = Clock::now();
    SegmentSetWriter writer(dir, 0, schema, [&] { return next_id++; }, counters, nullptr,
                            kDefaultSegmentTargetBytes, true);
    for (std::uint64_t i = 0; i < rows; ++i) {
      writer.append(Row{static_cast<std::int64_t>(i), pad});
    }
    segments = writer.finish();
    p.master_write_rate = rate(counters.snapshot().master_written, seconds_since(start));
  }
  {
    auto start = Clock::now();
    TableScanner scan(segments, schema, std::nullopt, counters);
    while (scan.next()) {
    }
    p.master_read_rate = rate(counters.snapshot().master_read, seconds_since(start));
  }
  const fs::path journal = dir / "calibrate_attached.log";
  {
    AttachedStore store(journal, schema, counters, nullptr, true);
    store.clear(0);
    const std::uint64_t patches = std::max<std::uint64_t>(1, rows / 8);
    std::mt19937_64 rng(7);
    std::vector<DeltaEntry> batch;
    auto start = Clock::now();
    for (std::uint64_t i = 0; i < patches; ++i) {
      RecordId id(0, static_cast<std::uint32_t>(rng() % rows));
      batch.push_back(DeltaEntry::patch(id, {{1, pad}}));
      if (batch.size() == 256) {
        store.apply(batch);
        batch.clear();
      }
    }
    if (!batch.empty()) store.apply(batch);
    p.attached_write_rate = rate(counters.snapshot().attached_written, seconds_since(start));
  }
  {
    auto start = Clock::now();
    AttachedStore store(journal, schema, counters);
    store.recover();
    const auto before = counters.snapshot().attached_read;
    auto cursor = store.scan_deltas(RecordId(), std::nullopt);
    while (cursor.next()) {
    }
    p.attached_read_rate =
        rate(counters.snapshot().attached_read - before, seconds_since(start));
  }
  for (const auto& h : segments) fs::remove(h.path);
  fs::remove(journal);
  return p;
}

}  // namespace dualtable

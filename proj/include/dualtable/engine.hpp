#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dualtable/attached_store.hpp"
#include "dualtable/catalog.hpp"
#include "dualtable/cost_model.hpp"
#include "dualtable/dml_parser.hpp"
#include "dualtable/io.hpp"
#include "dualtable/union_read.hpp"

namespace dualtable {

struct EngineOptions {
  // Stored in the catalog when given; otherwise the catalog's copy is used.
  std::optional<CostParams> cost_params;
  std::uint32_t k_default = 10;
  double compact_threshold = 0.25;
  double default_ratio = 0.05;
  double ewma_weight = 0.5;
  std::uint64_t segment_target_bytes = kDefaultSegmentTargetBytes;
  bool sync = false;
  // Run COMPACT after a DML statement when auto_compact_check says so.
  bool auto_compact = false;
  bool audit_log = true;
  FaultInjector* fault = nullptr;
};

struct ExecutionReport {
  std::uint64_t rows_matched = 0;
  std::uint64_t rows_changed = 0;
  std::optional<Plan> plan_used;
  std::optional<PlanDecision> decision;  // absent when the plan was forced without params
  // UPDATE: patch bytes / D (fraction of data rewritten). DELETE: matched / rows.
  double ratio_observed = 0;
  ByteCounts bytes;
  double wall_seconds = 0;
};

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<MergedRow> rows;
};

struct ExecutionResult {
  ExecutionReport report;
  std::optional<ResultSet> result;  // SELECT only
};

// Streaming SELECT over a snapshot; does not block writers.
class ResultCursor {
 public:
  ResultCursor(std::vector<std::string> columns, UnionReader reader)
      : columns_(std::move(columns)), reader_(std::move(reader)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  std::optional<MergedRow> next() { return reader_.next(); }

 private:
  std::vector<std::string> columns_;
  UnionReader reader_;
};

// Executes statements against one database directory.
//
// Per table there is one writer at a time; SELECT works on snapshots and
// runs alongside writers. COMPACT excludes both. Statement-level atomicity:
// a crash at any point recovers to the state before or after the statement.
class Engine {
 public:
  Engine(fs::path dir, EngineOptions options = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  ExecutionResult execute(const Statement& stmt);
  ExecutionResult execute(std::string_view text);

  ResultCursor select(const Statement& stmt);

  ExecutionReport exec_create(const Statement& stmt);
  ExecutionReport exec_drop(const Statement& stmt);
  ExecutionReport exec_insert(const Statement& stmt);
  ExecutionReport exec_load(const Statement& stmt);
  ExecutionReport exec_update(const Statement& stmt);
  ExecutionReport exec_delete(const Statement& stmt);
  ExecutionReport compact(std::string_view table);

  // attached_size / D above the configured threshold.
  bool auto_compact_check(std::string_view table) const;

  TableSnapshot snapshot(std::string_view table) const;
  TableStats stats(std::string_view table) const;
  std::vector<std::string> table_names() const;
  ByteCounts counters() const { return counters_.snapshot(); }
  IoCounters& io_counters() { return counters_; }
  const fs::path& dir() const { return dir_; }
  const EngineOptions& options() const { return options_; }
  std::optional<CostParams> cost_params() const;

 private:
  struct TableRuntime;
  using RuntimePtr = std::shared_ptr<TableRuntime>;

  RuntimePtr runtime(std::string_view table) const;
  TableSnapshot snapshot_unlocked(const TableRuntime& rt) const;
  void recover();
  void collect_garbage();
  TableStats compute_stats(const TableRuntime& rt) const;
  void refresh_stats(const TableRuntime& rt);
  std::optional<PlanDecision> decide(OpKind op, const Statement& stmt, const TableRuntime& rt,
                                     std::uint64_t key);
  std::uint32_t allocate_file_id(std::uint32_t table_id);
  void commit_append(TableRuntime& rt, const std::vector<SegmentHandle>& added);
  void commit_swap(TableRuntime& rt, const std::vector<SegmentHandle>& replacement);
  ExecutionReport write_rows(TableRuntime& rt, std::vector<Row> rows);
  void record_ratio(const TableRuntime& rt, std::uint64_t key, double observed);
  void audit(std::string_view table, OpKind op, double ratio, const PlanDecision& d);
  void maybe_auto_compact(std::string_view table);

  fs::path dir_;
  EngineOptions options_;
  mutable IoCounters counters_;
  mutable std::mutex catalog_mu_;
  Catalog catalog_;
  mutable std::mutex tables_mu_;
  std::map<std::string, RuntimePtr, std::less<>> tables_;
  std::mutex audit_mu_;
};

}  // namespace dualtable

#include "dualtable/engine.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <ctime>
#include <fstream>
#include <regex>
#include <set>

#include "dualtable/csv.hpp"
#include "dualtable/error.hpp"
#include "dualtable/expr_eval.hpp"
#include "dualtable/master_store.hpp"

namespace dualtable {

struct Engine::TableRuntime {
  std::string name;
  std::uint32_t table_id = 0;
  Schema schema;
  // One DML/COMPACT statement at a time.
  std::mutex writer_mu;
  // Shared by snapshot takers, exclusive for the whole of COMPACT.
  std::shared_mutex access_mu;
  // Guards `segments` and the pairing of segments with attached state.
  mutable std::mutex state_mu;
  std::vector<SegmentRef> segments;
  std::unique_ptr<AttachedStore> attached;
};

namespace {

using Clock = std::chrono::steady_clock;

fs::path journal_path(const fs::path& dir, std::uint32_t table_id) {
  return dir / ("t" + std::to_string(table_id) + "_attached.log");
}

std::uint64_t shape_key(const Statement& stmt) {
  Statement shape = stmt;
  shape.options = {};
  return statement_key(to_string(shape));
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void remove_files(const std::vector<SegmentHandle>& handles) {
  for (const auto& h : handles) {
    std::error_code ec;
    fs::remove(h.path, ec);
  }
}

struct BoundAssignment {
  std::size_t column;
  CompiledExpr value;
};

std::vector<BoundAssignment> bind_assignments(const Statement& stmt, const Schema& schema) {
  if (stmt.assignments.empty()) throw UserError("UPDATE needs at least one assignment");
  std::vector<BoundAssignment> out;
  std::set<std::size_t> seen;
  for (const auto& a : stmt.assignments) {
    auto idx = schema.find(a.column);
    if (!idx) throw UserError("unknown column '" + a.column + "'");
    if (!seen.insert(*idx).second) {
      throw UserError("column '" + a.column + "' assigned twice");
    }
    out.push_back({*idx, compile_assignment(*a.value, schema, *idx)});
  }
  return out;
}

bool same_cell(const Value& a, const Value& b) {
  if (a.index() == 2 && b.index() == 2) {
    return std::bit_cast<std::uint64_t>(std::get<double>(a)) ==
           std::bit_cast<std::uint64_t>(std::get<double>(b));
  }
  return a == b;
}

}  // namespace

Engine::Engine(fs::path dir, EngineOptions options)
    : dir_(std::move(dir)),
      options_(std::move(options)),
      catalog_(Catalog::open(dir_,
                             CatalogOptions{options_.default_ratio, options_.ewma_weight,
                                            options_.sync},
                             options_.fault)) {
  if (options_.cost_params) {
    options_.cost_params->validate();
    if (catalog_.cost_params() != options_.cost_params) {
      catalog_.set_cost_params(*options_.cost_params);
      catalog_.save();
    }
  }
  recover();
}

Engine::~Engine() = default;

void Engine::recover() {
  std::lock_guard cat(catalog_mu_);
  for (const auto& desc : catalog_.tables()) {
    auto rt = std::make_shared<TableRuntime>();
    rt->name = desc.name;
    rt->table_id = desc.table_id;
    rt->schema = desc.schema;
    for (auto file_id : desc.segments) {
      auto handle = open_segment(segment_path(dir_, desc.table_id, file_id), desc.schema);
      if (handle.table_id != desc.table_id || handle.file_id != file_id) {
        throw CorruptionError("segment " + handle.path.string() + " does not match its name");
      }
      rt->segments.push_back(std::make_shared<const SegmentFile>(std::move(handle)));
    }
    rt->attached = std::make_unique<AttachedStore>(journal_path(dir_, desc.table_id), desc.schema,
                                                   counters_, options_.fault, options_.sync);
    // A journal from another generation belongs to a segment set that was
    // swapped out (or never committed); its deltas do not apply.
    auto generation = rt->attached->recover();
    if (generation != desc.attached_generation) rt->attached->clear(desc.attached_generation);
    tables_.emplace(desc.name, std::move(rt));
  }
  for (const auto& [name, rt] : tables_) catalog_.get(rt->table_id).stats = compute_stats(*rt);
  collect_garbage();
}

void Engine::collect_garbage() {
  static const std::regex kSegment(R"(t(\d+)_f(\d+)\.dtb)");
  static const std::regex kJournal(R"(t(\d+)_attached\.log)");
  std::set<std::pair<std::uint64_t, std::uint64_t>> live;
  std::set<std::uint64_t> tables;
  for (const auto& desc : catalog_.tables()) {
    tables.insert(desc.table_id);
    for (auto f : desc.segments) live.insert({desc.table_id, f});
  }
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir_, ec)) {
    const auto name = entry.path().filename().string();
    std::smatch m;
    bool orphan = false;
    if (std::regex_match(name, m, kSegment)) {
      orphan = !live.contains({std::stoull(m[1]), std::stoull(m[2])});
    } else if (std::regex_match(name, m, kJournal)) {
      orphan = !tables.contains(std::stoull(m[1]));
    } else if (name.ends_with(".tmp")) {
      orphan = true;
    }
    if (orphan) {
      std::error_code rm;
      fs::remove(entry.path(), rm);
    }
  }
}

Engine::RuntimePtr Engine::runtime(std::string_view table) const {
  std::lock_guard lock(tables_mu_);
  auto it = tables_.find(table);
  if (it == tables_.end()) throw UserError("unknown table '" + std::string(table) + "'");
  return it->second;
}

TableSnapshot Engine::snapshot_unlocked(const TableRuntime& rt) const {
  std::lock_guard state(rt.state_mu);
  return TableSnapshot{rt.schema, rt.segments, rt.attached->snapshot()};
}

TableSnapshot Engine::snapshot(std::string_view table) const {
  auto rt = runtime(table);
  std::shared_lock access(rt->access_mu);
  return snapshot_unlocked(*rt);
}

TableStats Engine::compute_stats(const TableRuntime& rt) const {
  TableStats s;
  std::lock_guard state(rt.state_mu);
  for (const auto& seg : rt.segments) {
    s.data_size += seg->handle().file_size;
    s.row_count += seg->handle().row_count;
  }
  s.avg_row_size = s.row_count == 0 ? 0.0
                                    : static_cast<double>(s.data_size) /
                                          static_cast<double>(s.row_count);
  s.attached_size = rt.attached->size_bytes();
  s.attached_entries = rt.attached->entry_count();
  return s;
}

void Engine::refresh_stats(const TableRuntime& rt) {
  auto s = compute_stats(rt);
  std::lock_guard cat(catalog_mu_);
  catalog_.get(rt.table_id).stats = s;
}

TableStats Engine::stats(std::string_view table) const {
  return compute_stats(*runtime(table));
}

std::vector<std::string> Engine::table_names() const {
  std::lock_guard lock(tables_mu_);
  std::vector<std::string> out;
  for (const auto& [name, rt] : tables_) out.push_back(name);
  return out;
}

std::optional<CostParams> Engine::cost_params() const {
  std::lock_guard cat(catalog_mu_);
  return catalog_.cost_params();
}

bool Engine::auto_compact_check(std::string_view table) const {
  auto s = stats(table);
  if (s.attached_size == 0) return false;
  if (s.data_size == 0) return true;
  return static_cast<double>(s.attached_size) / static_cast<double>(s.data_size) >
         options_.compact_threshold;
}

std::uint32_t Engine::allocate_file_id(std::uint32_t table_id) {
  std::lock_guard cat(catalog_mu_);
  return catalog_.allocate_file_id(table_id);
}

std::optional<PlanDecision> Engine::decide(OpKind op, const Statement& stmt,
                                           const TableRuntime& rt, std::uint64_t key) {
  std::optional<PlanDecision> decision;
  double ratio = 0;
  {
    std::lock_guard cat(catalog_mu_);
    auto& desc = catalog_.get(rt.table_id);
    ratio = catalog_.estimate_ratio(rt.table_id, key, stmt.options.ratio);
    if (auto params = catalog_.cost_params()) {
      CostParams p = *params;
      p.successive_reads_k = stmt.options.k.value_or(desc.successive_reads_k);
      p.marker_size = static_cast<double>(kMarkerSize);
      decision = choose_plan(op, desc.stats, ratio, p);
    } else if (!stmt.options.plan) {
      throw UserError(
          "cost parameters are not configured; set W_M, R_M, W_A and R_A or force a plan");
    }
  }
  if (stmt.options.plan && decision) decision->plan = *stmt.options.plan;
  if (decision) audit(rt.name, op, ratio, *decision);
  return decision;
}

void Engine::audit(std::string_view table, OpKind op, double ratio, const PlanDecision& d) {
  if (!options_.audit_log) return;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char ts[32];
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", &tm);
  std::lock_guard lock(audit_mu_);
  std::ofstream out(dir_ / "audit.log", std::ios::app);
  out << ts << ',' << table << ',' << to_string(op) << ',' << format_value(ratio) << ','
      << format_value(d.cost_margin_seconds) << ',' << to_string(d.plan) << '\n';
}

void Engine::record_ratio(const TableRuntime& rt, std::uint64_t key, double observed) {
  std::lock_guard cat(catalog_mu_);
  catalog_.record_observed_ratio(rt.table_id, key, std::clamp(observed, 0.0, 1.0));
}

void Engine::commit_append(TableRuntime& rt, const std::vector<SegmentHandle>& added) {
  if (added.empty()) return;
  {
    std::lock_guard cat(catalog_mu_);
    auto& desc = catalog_.get(rt.table_id);
    const auto saved = desc;
    for (const auto& h : added) desc.segments.push_back(h.file_id);
    std::sort(desc.segments.begin(), desc.segments.end());
    try {
      catalog_.save();
    } catch (const SimulatedCrash&) {
      throw;
    } catch (...) {
      desc = saved;
      remove_files(added);
      throw;
    }
  }
  {
    std::lock_guard state(rt.state_mu);
    for (const auto& h : added) rt.segments.push_back(std::make_shared<const SegmentFile>(h));
    std::sort(rt.segments.begin(), rt.segments.end(), [](const auto& a, const auto& b) {
      return a->handle().file_id < b->handle().file_id;
    });
  }
  refresh_stats(rt);
}

void Engine::commit_swap(TableRuntime& rt, const std::vector<SegmentHandle>& replacement) {
  std::uint64_t generation = 0;
  {
    std::lock_guard cat(catalog_mu_);
    auto& desc = catalog_.get(rt.table_id);
    const auto saved = desc;
    desc.segments.clear();
    for (const auto& h : replacement) desc.segments.push_back(h.file_id);
    std::sort(desc.segments.begin(), desc.segments.end());
    desc.attached_generation += 1;
    generation = desc.attached_generation;
    try {
      catalog_.save();
    } catch (const SimulatedCrash&) {
      throw;
    } catch (...) {
      desc = saved;
      remove_files(replacement);
      throw;
    }
  }
  std::vector<SegmentRef> retired;
  {
    std::lock_guard state(rt.state_mu);
    std::vector<SegmentRef> fresh;
    for (const auto& h : replacement) fresh.push_back(std::make_shared<const SegmentFile>(h));
    std::sort(fresh.begin(), fresh.end(), [](const auto& a, const auto& b) {
      return a->handle().file_id < b->handle().file_id;
    });
    retired = std::exchange(rt.segments, std::move(fresh));
    for (const auto& seg : retired) seg->mark_obsolete();
    rt.attached->clear(generation);
  }
  refresh_stats(rt);
}

ExecutionResult Engine::execute(std::string_view text) { return execute(parse(text)); }

ExecutionResult Engine::execute(const Statement& stmt) {
  ExecutionResult out;
  switch (stmt.kind) {
    case StatementKind::kSelect: {
      const auto start = Clock::now();
      const auto before = counters();
      auto cursor = select(stmt);
      ResultSet rs;
      rs.columns = cursor.columns();
      while (auto row = cursor.next()) rs.rows.push_back(std::move(*row));
      out.report.rows_matched = rs.rows.size();
      out.report.bytes = counters() - before;
      out.report.wall_seconds = seconds_since(start);
      out.result = std::move(rs);
      break;
    }
    case StatementKind::kUpdate:
      out.report = exec_update(stmt);
      break;
    case StatementKind::kDelete:
      out.report = exec_delete(stmt);
      break;
    case StatementKind::kInsert:
      out.report = exec_insert(stmt);
      break;
    case StatementKind::kLoad:
      out.report = exec_load(stmt);
      break;
    case StatementKind::kCreate:
      out.report = exec_create(stmt);
      break;
    case StatementKind::kDrop:
      out.report = exec_drop(stmt);
      break;
    case StatementKind::kCompact:
      out.report = compact(stmt.table);
      break;
  }
  return out;
}

ResultCursor Engine::select(const Statement& stmt) {
  auto rt = runtime(stmt.table);
  std::vector<std::string> names;
  Projection projection;
  if (stmt.columns.empty()) {
    for (const auto& c : rt->schema.columns) names.push_back(c.name);
  } else {
    std::vector<std::size_t> ords;
    for (const auto& c : stmt.columns) {
      auto idx = rt->schema.find(c);
      if (!idx) throw UserError("unknown column '" + c + "'");
      ords.push_back(*idx);
      names.push_back(c);
    }
    projection = std::move(ords);
  }
  RowPredicate pred;
  if (stmt.where) pred = compile_predicate(*stmt.where, rt->schema);
  TableSnapshot snap;
  {
    std::shared_lock access(rt->access_mu);
    snap = snapshot_unlocked(*rt);
  }
  return ResultCursor(std::move(names),
                      union_read(snap, std::move(projection), std::move(pred), counters_));
}

ExecutionReport Engine::exec_create(const Statement& stmt) {
  const auto start = Clock::now();
  std::lock_guard tables(tables_mu_);
  auto rt = std::make_shared<TableRuntime>();
  {
    std::lock_guard cat(catalog_mu_);
    auto& desc = catalog_.create_table(stmt.table, stmt.schema,
                                       stmt.options.k.value_or(options_.k_default));
    rt->name = desc.name;
    rt->table_id = desc.table_id;
    rt->schema = desc.schema;
  }
  rt->attached = std::make_unique<AttachedStore>(journal_path(dir_, rt->table_id), rt->schema,
                                                 counters_, options_.fault, options_.sync);
  rt->attached->clear(0);
  tables_.emplace(rt->name, std::move(rt));
  ExecutionReport report;
  report.wall_seconds = seconds_since(start);
  return report;
}

ExecutionReport Engine::exec_drop(const Statement& stmt) {
  const auto start = Clock::now();
  auto rt = runtime(stmt.table);
  std::lock_guard writer(rt->writer_mu);
  std::unique_lock access(rt->access_mu);
  {
    std::lock_guard cat(catalog_mu_);
    catalog_.drop_table(stmt.table);
  }
  {
    std::lock_guard tables(tables_mu_);
    tables_.erase(rt->name);
  }
  {
    std::lock_guard state(rt->state_mu);
    for (const auto& seg : rt->segments) seg->mark_obsolete();
    rt->segments.clear();
  }
  std::error_code ec;
  fs::remove(rt->attached->journal_path(), ec);
  ExecutionReport report;
  report.wall_seconds = seconds_since(start);
  return report;
}

ExecutionReport Engine::write_rows(TableRuntime& rt, std::vector<Row> rows) {
  const auto start = Clock::now();
  const auto before = counters();
  std::vector<SegmentHandle> added;
  {
    SegmentSetWriter writer(dir_, rt.table_id, rt.schema,
                            [this, id = rt.table_id] { return allocate_file_id(id); }, counters_,
                            options_.fault, options_.segment_target_bytes, options_.sync);
    try {
      for (auto& row : rows) writer.append(std::move(row));
      added = writer.finish();
    } catch (const SimulatedCrash&) {
      writer.disown();
      throw;
    }
  }
  commit_append(rt, added);
  ExecutionReport report;
  report.rows_matched = rows.size();
  report.rows_changed = rows.size();
  report.bytes = counters() - before;
  report.wall_seconds = seconds_since(start);
  return report;
}

ExecutionReport Engine::exec_insert(const Statement& stmt) {
  auto rt = runtime(stmt.table);
  std::vector<Row> rows;
  rows.reserve(stmt.tuples.size());
  for (const auto& tuple : stmt.tuples) {
    if (tuple.size() != rt->schema.size()) {
      throw UserError("INSERT row has " + std::to_string(tuple.size()) + " values, table '" +
                      rt->name + "' has " + std::to_string(rt->schema.size()) + " columns");
    }
    Row row;
    row.reserve(tuple.size());
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      row.push_back(coerce_literal(tuple[i], rt->schema.columns[i]));
    }
    rows.push_back(std::move(row));
  }
  std::unique_lock writer(rt->writer_mu);
  std::shared_lock access(rt->access_mu);
  return write_rows(*rt, std::move(rows));
}

ExecutionReport Engine::exec_load(const Statement& stmt) {
  auto rt = runtime(stmt.table);
  std::ifstream in(stmt.path, std::ios::binary);
  if (!in) throw UserError("cannot open '" + stmt.path + "'");
  std::vector<Row> rows;
  std::vector<CsvField> fields;
  std::size_t record = 0;
  while (read_csv_record(in, fields)) {
    ++record;
    if (fields.size() != rt->schema.size()) {
      throw UserError(stmt.path + ": record " + std::to_string(record) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(rt->schema.size()));
    }
    Row row;
    row.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      try {
        row.push_back(parse_csv_value(fields[i], rt->schema.columns[i].type));
      } catch (const UserError& e) {
        throw UserError(stmt.path + ": record " + std::to_string(record) + ", column '" +
                        rt->schema.columns[i].name + "': " + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  std::unique_lock writer(rt->writer_mu);
  std::shared_lock access(rt->access_mu);
  return write_rows(*rt, std::move(rows));
}

ExecutionReport Engine::exec_update(const Statement& stmt) {
  auto rt = runtime(stmt.table);
  const auto assignments = bind_assignments(stmt, rt->schema);
  RowPredicate pred;
  if (stmt.where) pred = compile_predicate(*stmt.where, rt->schema);
  const auto key = shape_key(stmt);

  std::unique_lock writer(rt->writer_mu);
  std::shared_lock access(rt->access_mu);
  const auto start = Clock::now();
  const auto before = counters();

  ExecutionReport report;
  report.decision = decide(OpKind::kUpdate, stmt, *rt, key);
  const Plan plan = report.decision ? report.decision->plan : *stmt.options.plan;
  report.plan_used = plan;

  const auto snap = snapshot_unlocked(*rt);
  std::uint64_t data_size = 0;
  for (const auto& seg : snap.segments) data_size += seg->handle().file_size;
  std::uint64_t patch_bytes = 0;

  auto patch_for = [&](const Row& row, bool& changed) {
    PatchMap patch;
    changed = false;
    for (const auto& a : assignments) {
      Value v = a.value(row);
      if (!same_cell(v, row[a.column])) changed = true;
      patch.emplace(static_cast<std::uint16_t>(a.column), std::move(v));
    }
    return patch;
  };

  if (plan == Plan::kEdit) {
    std::vector<DeltaEntry> batch;
    auto reader = union_read(snap, std::nullopt, pred, counters_);
    while (auto row = reader.next()) {
      bool changed = false;
      auto patch = patch_for(row->row, changed);
      ++report.rows_matched;
      if (changed) ++report.rows_changed;
      patch_bytes += patch_entry_size(patch);
      batch.push_back(DeltaEntry::patch(row->record_id, std::move(patch)));
    }
    if (!batch.empty()) rt->attached->apply(batch);
    refresh_stats(*rt);
  } else {
    std::vector<SegmentHandle> replacement;
    {
      SegmentSetWriter out(dir_, rt->table_id, rt->schema,
                           [this, id = rt->table_id] { return allocate_file_id(id); },
                           counters_, options_.fault, options_.segment_target_bytes,
                           options_.sync);
      try {
        auto reader = union_read(snap, std::nullopt, nullptr, counters_);
        while (auto row = reader.next()) {
          if (!pred || pred(row->row)) {
            bool changed = false;
            auto patch = patch_for(row->row, changed);
            ++report.rows_matched;
            if (changed) ++report.rows_changed;
            patch_bytes += patch_entry_size(patch);
            for (auto& [ord, v] : patch) row->row[ord] = std::move(v);
          }
          out.append(std::move(row->row));
        }
        replacement = out.finish();
      } catch (const SimulatedCrash&) {
        out.disown();
        throw;
      }
    }
    commit_swap(*rt, replacement);
  }

  report.ratio_observed =
      data_size == 0 ? 0.0
                     : std::min(1.0, static_cast<double>(patch_bytes) /
                                         static_cast<double>(data_size));
  record_ratio(*rt, key, report.ratio_observed);
  report.bytes = counters() - before;
  report.wall_seconds = seconds_since(start);
  access.unlock();
  writer.unlock();
  maybe_auto_compact(rt->name);
  return report;
}

ExecutionReport Engine::exec_delete(const Statement& stmt) {
  auto rt = runtime(stmt.table);
  RowPredicate pred;
  if (stmt.where) pred = compile_predicate(*stmt.where, rt->schema);
  const auto key = shape_key(stmt);

  std::unique_lock writer(rt->writer_mu);
  std::shared_lock access(rt->access_mu);
  const auto start = Clock::now();
  const auto before = counters();

  ExecutionReport report;
  report.decision = decide(OpKind::kDelete, stmt, *rt, key);
  const Plan plan = report.decision ? report.decision->plan : *stmt.options.plan;
  report.plan_used = plan;

  const auto snap = snapshot_unlocked(*rt);
  std::uint64_t row_count = 0;
  for (const auto& seg : snap.segments) row_count += seg->handle().row_count;

  if (plan == Plan::kEdit) {
    std::vector<DeltaEntry> batch;
    auto reader = union_read(snap, std::vector<std::size_t>{}, pred, counters_);
    while (auto row = reader.next()) batch.push_back(DeltaEntry::marker(row->record_id));
    report.rows_matched = batch.size();
    if (!batch.empty()) rt->attached->apply(batch);
    refresh_stats(*rt);
  } else {
    std::vector<SegmentHandle> replacement;
    {
      SegmentSetWriter out(dir_, rt->table_id, rt->schema,
                           [this, id = rt->table_id] { return allocate_file_id(id); },
                           counters_, options_.fault, options_.segment_target_bytes,
                           options_.sync);
      try {
        auto reader = union_read(snap, std::nullopt, nullptr, counters_);
        while (auto row = reader.next()) {
          if (!pred || pred(row->row)) {
            ++report.rows_matched;
            continue;
          }
          out.append(std::move(row->row));
        }
        replacement = out.finish();
      } catch (const SimulatedCrash&) {
        out.disown();
        throw;
      }
    }
    commit_swap(*rt, replacement);
  }
  report.rows_changed = report.rows_matched;
  report.ratio_observed =
      row_count == 0 ? 0.0
                     : std::min(1.0, static_cast<double>(report.rows_matched) /
                                         static_cast<double>(row_count));
  record_ratio(*rt, key, report.ratio_observed);
  report.bytes = counters() - before;
  report.wall_seconds = seconds_since(start);
  access.unlock();
  writer.unlock();
  maybe_auto_compact(rt->name);
  return report;
}

ExecutionReport Engine::compact(std::string_view table) {
  auto rt = runtime(table);
  std::lock_guard writer(rt->writer_mu);
  std::unique_lock access(rt->access_mu);
  const auto start = Clock::now();
  const auto before = counters();
  ExecutionReport report;

  const auto snap = snapshot_unlocked(*rt);
  std::vector<SegmentHandle> replacement;
  {
    SegmentSetWriter out(dir_, rt->table_id, rt->schema,
                         [this, id = rt->table_id] { return allocate_file_id(id); }, counters_,
                         options_.fault, options_.segment_target_bytes, options_.sync);
    try {
      auto reader = union_read(snap, std::nullopt, nullptr, counters_);
      while (auto row = reader.next()) {
        ++report.rows_matched;
        out.append(std::move(row->row));
      }
      replacement = out.finish();
    } catch (const SimulatedCrash&) {
      out.disown();
      throw;
    }
  }
  commit_swap(*rt, replacement);
  report.bytes = counters() - before;
  report.wall_seconds = seconds_since(start);
  return report;
}

void Engine::maybe_auto_compact(std::string_view table) {
  if (options_.auto_compact && auto_compact_check(table)) compact(table);
}

}  // namespace dualtable

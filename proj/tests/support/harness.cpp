#include "harness.hpp"

#include <algorithm>
#include <set>

#include "dualtable/error.hpp"

namespace dualtable::testing {

View engine_view(Engine& engine) {
  View out;
  for (const auto& name : engine.table_names()) {
    Statement s;
    s.kind = StatementKind::kSelect;
    s.table = name;
    auto cursor = engine.select(s);
    auto& rows = out[name];
    while (auto r = cursor.next()) rows.push_back(std::move(r->row));
  }
  return out;
}

View oracle_view(const ListOracle& oracle, const std::vector<std::string>& tables) {
  View out;
  for (const auto& t : tables) {
    if (oracle.has_table(t)) out[t] = oracle.table(t).rows;
  }
  return out;
}

bool same_view(const View& a, const View& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [name, rows] : a) {
    auto it = b.find(name);
    if (it == b.end() || !same_rows(rows, it->second)) return false;
  }
  return true;
}

ScriptCheck check_script(Engine& engine, const std::vector<Statement>& script,
                         std::optional<Plan> force) {
  ScriptCheck check;
  ListOracle oracle;
  for (std::size_t i = 0; i < script.size(); ++i) {
    Statement stmt = script[i];
    if (force && (stmt.kind == StatementKind::kUpdate || stmt.kind == StatementKind::kDelete)) {
      stmt.options.plan = force;
    }
    ++check.statements;
    std::optional<std::vector<Row>> expect;
    bool oracle_failed = false;
    try {
      expect = oracle.apply(stmt);
    } catch (const UserError&) {
      oracle_failed = true;
    }
    std::optional<ExecutionResult> got;
    bool engine_failed = false;
    std::string engine_error;
    try {
      got = engine.execute(stmt);
    } catch (const UserError& e) {
      engine_failed = true;
      engine_error = e.what();
    }
    const std::string where = "statement " + std::to_string(i) + " (" + to_string(stmt) + ")";
    if (oracle_failed != engine_failed) {
      check.mismatches.push_back(where + ": oracle " + (oracle_failed ? "failed" : "succeeded") +
                                 ", engine " + (engine_failed ? "failed: " + engine_error : "succeeded"));
      continue;
    }
    if (oracle_failed) {
      ++check.failed_statements;
      continue;
    }
    if (stmt.kind == StatementKind::kSelect) {
      ++check.selects;
      std::vector<Row> rows;
      for (auto& r : got->result->rows) rows.push_back(std::move(r.row));
      if (!same_rows(rows, *expect)) {
        check.mismatches.push_back(where + ": SELECT differs (" + std::to_string(rows.size()) +
                                   " vs " + std::to_string(expect->size()) + " rows)");
      }
    }
  }
  return check;
}

namespace {

std::vector<std::string> tables_of(const std::vector<Statement>& stmts) {
  std::set<std::string> names;
  for (const auto& s : stmts) names.insert(s.table);
  return {names.begin(), names.end()};
}

std::set<std::string> files_in(const std::filesystem::path& dir) {
  std::set<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    out.insert(e.path().filename().string());
  }
  return out;
}

}  // namespace

CrashReport crash_sweep(const std::vector<Statement>& setup, const Statement& target,
                        const EngineOptions& options, const std::filesystem::path& scratch,
                        std::size_t max_points) {
  CrashReport report;
  std::vector<Statement> all = setup;
  all.push_back(target);
  const auto names = tables_of(all);

  // Setup statements may fail (e.g. division by zero); both sides skip them.
  ListOracle oracle;
  for (const auto& s : setup) {
    try {
      oracle.apply(s);
    } catch (const UserError&) {
    }
  }
  const View pre = oracle_view(oracle, names);
  try {
    oracle.apply(target);
  } catch (const UserError&) {
    return report;  // nothing to crash: the statement is rejected before it commits
  }
  const View post = oracle_view(oracle, names);
  const auto run_setup = [&](Engine& engine) {
    for (const auto& s : setup) {
      try {
        engine.execute(s);
      } catch (const UserError&) {
      }
    }
  };

  // Count the I/O steps of the target statement.
  std::uint64_t steps = 0;
  {
    std::filesystem::remove_all(scratch);
    FaultInjector counting;
    EngineOptions o = options;
    o.fault = &counting;
    Engine engine(scratch, o);
    run_setup(engine);
    counting.reset_count();
    engine.execute(target);
    steps = counting.steps_seen();
  }

  std::vector<std::uint64_t> points;
  for (std::uint64_t s = 0; s < steps; ++s) points.push_back(s);
  if (points.size() > max_points) {
    std::vector<std::uint64_t> spread;
    for (std::size_t i = 0; i < max_points; ++i) {
      spread.push_back(points[i * (points.size() - 1) / std::max<std::size_t>(1, max_points - 1)]);
    }
    spread.erase(std::unique(spread.begin(), spread.end()), spread.end());
    points = spread;
  }

  for (auto step : points) {
    ++report.points;
    const std::string tag = to_string(target) + " @ step " + std::to_string(step);
    std::filesystem::remove_all(scratch);
    FaultInjector fault;
    bool crashed = false;
    {
      EngineOptions o = options;
      o.fault = &fault;
      Engine engine(scratch, o);
      run_setup(engine);
      fault.arm(step);
      try {
        engine.execute(target);
      } catch (const SimulatedCrash&) {
        crashed = true;
      }
    }
    if (!crashed) {
      report.failures.push_back(tag + ": no crash");
      continue;
    }
    try {
      EngineOptions o = options;
      o.fault = nullptr;
      Engine engine(scratch, o);
      const View view = engine_view(engine);
      if (same_view(view, pre)) {
        ++report.recovered_pre;
      } else if (same_view(view, post)) {
        ++report.recovered_post;
      } else {
        report.failures.push_back(tag + ": torn view after recovery");
        continue;
      }
      // Leftovers of the interrupted statement must be gone, and the
      // database must accept further work.
      for (const auto& f : files_in(scratch)) {
        if (f.ends_with(".tmp")) report.failures.push_back(tag + ": leftover " + f);
      }
      for (const auto& name : engine.table_names()) {
        engine.compact(name);
        if (!same_view(engine_view(engine), view)) {
          report.failures.push_back(tag + ": compact after recovery changed the view");
        }
      }
    } catch (const std::exception& e) {
      report.failures.push_back(tag + ": recovery threw: " + e.what());
    }
  }
  return report;
}

}  // namespace dualtable::testing

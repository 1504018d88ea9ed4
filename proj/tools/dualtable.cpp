// dualtable: command-line front end for the engine.
//
//   dualtable [--data-dir DIR] [--config FILE] [--set key=value]... <command>
//
// Exit status: 0 ok, 1 user error (syntax, unknown table, bad input),
// 2 internal error (I/O, corruption).

#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>

#include "dualtable/bench.hpp"
#include "dualtable/config.hpp"
#include "dualtable/csv.hpp"
#include "dualtable/engine.hpp"
#include "dualtable/error.hpp"

namespace dt = dualtable;

namespace {

struct StatementError {
  dt::SourceSpan span;
  std::string message;
};

void print_result(const dt::ExecutionResult& result, bool report) {
  if (result.result) {
    dt::write_csv_row(std::cout, result.result->columns);
    for (const auto& row : result.result->rows) dt::write_csv_row(std::cout, row.row);
  }
  if (report) {
    const auto& r = result.report;
    std::cerr << "rows_matched=" << r.rows_matched << " rows_changed=" << r.rows_changed;
    if (r.plan_used) std::cerr << " plan=" << dt::to_string(*r.plan_used);
    if (r.decision) std::cerr << " margin_s=" << dt::format_value(r.decision->cost_margin_seconds);
    std::cerr << " master_read=" << r.bytes.master_read
              << " master_written=" << r.bytes.master_written
              << " attached_read=" << r.bytes.attached_read
              << " attached_written=" << r.bytes.attached_written
              << " wall_s=" << dt::format_value(r.wall_seconds) << '\n';
  }
}

void execute_script(dt::Engine& engine, std::string_view text, bool report) {
  dt::ScriptParser parser(text);
  while (auto stmt = parser.next()) {
    try {
      print_result(engine.execute(*stmt), report);
    } catch (const dt::UserError& e) {
      throw StatementError{stmt->span, e.what()};
    }
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dt::UserError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void repl(dt::Engine& engine, bool report) {
  std::string buffer;
  std::string line;
  const bool tty = isatty(0);
  if (tty) std::cerr << "dualtable> " << std::flush;
  while (std::getline(std::cin, line)) {
    buffer += line;
    buffer += '\n';
    if (line.find(';') != std::string::npos) {
      try {
        execute_script(engine, buffer, report);
      } catch (const dt::ParseError& e) {
        std::cerr << e.what() << '\n';
      } catch (const StatementError& e) {
        std::cerr << e.span.line << ':' << e.span.column << ": " << e.message << '\n';
      } catch (const dt::UserError& e) {
        std::cerr << e.what() << '\n';
      }
      buffer.clear();
    }
    if (tty) std::cerr << (buffer.empty() ? "dualtable> " : "      ...> ") << std::flush;
  }
  if (!buffer.empty()) execute_script(engine, buffer, report);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw dt::UserError("bad grid value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dualtable: hybrid master/attached storage engine"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> settings;
  std::string data_dir;
  bool report = false;
  app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--set", settings, "override a config key (key=value)");
  app.add_option("--data-dir", data_dir, "database directory");
  app.add_flag("--report", report, "print an execution report per statement to stderr");

  auto* run = app.add_subcommand("run", "execute a script");
  std::string script;
  run->add_option("script", script, "script file")->required();

  auto* repl_cmd = app.add_subcommand("repl", "read statements from stdin");

  auto* bench = app.add_subcommand("bench", "ratio sweep; CSV to stdout");
  std::string op = "update";
  std::uint64_t rows = 10000;
  std::uint32_t cols = 8;
  std::string grid = "0.01,0.05,0.1,0.2,0.3,0.4,0.5";
  std::uint32_t k = 3;
  std::string params_path;
  std::uint32_t reps = 1;
  std::uint64_t seed = 42;
  std::string work_dir;
  std::string out_path;
  bench->add_option("--op", op, "update or delete")->check(CLI::IsMember({"update", "delete"}));
  bench->add_option("--rows", rows, "table rows");
  bench->add_option("--cols", cols, "columns (selector + payload)");
  bench->add_option("--grid", grid, "comma-separated ratios");
  bench->add_option("--k", k, "successive full reads after the DML");
  bench->add_option("--params", params_path, "config file with W_M, R_M, W_A, R_A")
      ->check(CLI::ExistingFile);
  bench->add_option("--reps", reps, "repetitions");
  bench->add_option("--seed", seed, "RNG seed");
  bench->add_option("--work-dir", work_dir, "scratch directory (default: <data-dir>/bench)");
  bench->add_option("--out", out_path, "write CSV here instead of stdout");

  auto* compact = app.add_subcommand("compact", "rewrite a table and empty its attached store");
  std::string table;
  compact->add_option("table", table, "table name")->required();

  auto* calibrate = app.add_subcommand("calibrate", "measure store throughput");
  std::uint64_t probe_mib = 64;
  calibrate->add_option("--probe-mib", probe_mib, "probe size in MiB");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    dt::Config config;
    if (!config_path.empty()) config.load_file(config_path);
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw dt::UserError("--set expects key=value, got '" + s + "'");
      config.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!data_dir.empty()) config.data_dir = data_dir;

    if (*bench) {
      if (!params_path.empty()) config.load_file(params_path);
      dt::BenchSpec spec;
      spec.op = op == "update" ? dt::OpKind::kUpdate : dt::OpKind::kDelete;
      spec.rows = rows;
      spec.cols = cols;
      spec.grid = parse_grid(grid);
      spec.k = k;
      spec.params = config.params;
      spec.repetitions = reps;
      spec.seed = seed;
      spec.segment_target_bytes = config.engine.segment_target_bytes;
      spec.work_dir = work_dir.empty() ? config.data_dir / "bench" : std::filesystem::path(work_dir);
      const auto result = dt::bench_sweep(spec);
      if (out_path.empty()) {
        dt::write_bench_csv(std::cout, result);
      } else {
        std::ofstream out(out_path);
        if (!out) throw dt::UserError("cannot write '" + out_path + "'");
        dt::write_bench_csv(out, result);
      }
      return 0;
    }

    if (*calibrate) {
      const auto p = dt::calibrate(config.data_dir / "calibrate", probe_mib << 20);
      std::cout << "W_M=" << dt::format_value(p.master_write_rate) << '\n'
                << "R_M=" << dt::format_value(p.master_read_rate) << '\n'
                << "W_A=" << dt::format_value(p.attached_write_rate) << '\n'
                << "R_A=" << dt::format_value(p.attached_read_rate) << '\n';
      return 0;
    }

    dt::Engine engine(config.data_dir, config.engine_options());
    if (*run) {
      execute_script(engine, read_text(script), report);
    } else if (*repl_cmd) {
      repl(engine, report);
    } else if (*compact) {
      dt::ExecutionResult r;
      r.report = engine.compact(table);
      print_result(r, report);
    }
    return 0;
  } catch (const dt::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const StatementError& e) {
    std::cerr << e.span.line << ':' << e.span.column << ": " << e.message << '\n';
    return 1;
  } catch (const dt::UserError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}

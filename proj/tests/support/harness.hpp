#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dualtable/engine.hpp"
#include "oracle.hpp"

namespace dualtable::testing {

// Every table's rows (SELECT *) keyed by name.
using View = std::map<std::string, std::vector<Row>>;

View engine_view(Engine& engine);
View oracle_view(const ListOracle& oracle, const std::vector<std::string>& tables);
bool same_view(const View& a, const View& b);

// How one engine run of a script compares with the list oracle.
struct ScriptCheck {
  std::size_t statements = 0;
  std::size_t selects = 0;
  std::size_t failed_statements = 0;  // rejected by both engine and oracle
  std::vector<std::string> mismatches;
};

// Runs `script` through the engine and the oracle side by side. With
// `force`, every UPDATE and DELETE carries that plan.
ScriptCheck check_script(Engine& engine, const std::vector<Statement>& script,
                         std::optional<Plan> force);

struct CrashReport {
  std::size_t points = 0;
  std::size_t recovered_pre = 0;
  std::size_t recovered_post = 0;
  std::vector<std::string> failures;
};

// Crashes `target` at each of its I/O steps (up to `max_points`, evenly
// spread) after running `setup`, reopens the database and checks that the
// recovered view equals the view before or after the statement, and that
// the database keeps working.
CrashReport crash_sweep(const std::vector<Statement>& setup, const Statement& target,
                        const EngineOptions& options, const std::filesystem::path& scratch,
                        std::size_t max_points = 1000);

}  // namespace dualtable::testing

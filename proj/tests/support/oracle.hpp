#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dualtable/dml_parser.hpp"
#include "dualtable/value.hpp"

namespace dualtable::testing {

// Brute-force reference: every table is a plain list of rows in insertion
// order and statements are applied by direct interpretation. Expression
// evaluation is written independently of the engine.
class ListOracle {
 public:
  struct Table {
    Schema schema;
    std::vector<Row> rows;
  };

  // SELECT returns its rows; other statements return nothing. Throws
  // UserError for the same failures the engine rejects (unknown table or
  // column, division by zero, integer overflow); state is then unchanged.
  std::optional<std::vector<Row>> apply(const Statement& stmt);

  const Table& table(const std::string& name) const { return tables_.at(name); }
  bool has_table(const std::string& name) const { return tables_.contains(name); }

 private:
  std::map<std::string, Table> tables_;
};

Value oracle_eval(const Expr& expr, const Schema& schema, const Row& row);
bool oracle_matches(const Predicate& pred, const Schema& schema, const Row& row);

// Cell equality with float64 compared bit-for-bit.
bool same_rows(const std::vector<Row>& a, const std::vector<Row>& b);

struct ScriptSpec {
  std::size_t max_rows = 1000;
  std::size_t max_cols = 8;
  std::size_t statements = 50;
};

// CREATE + initial INSERT, then a random mix of INSERT, UPDATE, DELETE,
// COMPACT and SELECT over one table. Statements are well typed; some fail
// at run time (division by zero).
std::vector<Statement> random_script(std::mt19937_64& rng, const ScriptSpec& spec,
                                     const std::string& table = "t");

// Any statement kind with arbitrary options, for printer/parser checks.
Statement random_statement(std::mt19937_64& rng);

}  // namespace dualtable::testing

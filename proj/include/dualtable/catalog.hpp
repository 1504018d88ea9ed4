#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualtable/cost_model.hpp"
#include "dualtable/io.hpp"
#include "dualtable/value.hpp"

namespace dualtable {

struct TableStats {
  std::uint64_t data_size = 0;  // D: bytes across master segment files
  std::uint64_t row_count = 0;  // master rows, including rows masked by delete markers
  double avg_row_size = 0;      // d = D / row_count
  std::uint64_t attached_size = 0;
  std::uint64_t attached_entries = 0;

  bool operator==(const TableStats&) const = default;
};

// Observed modification ratios for one statement shape.
class RatioHistory {
 public:
  static constexpr std::size_t kMaxSamples = 32;

  RatioHistory() = default;
  RatioHistory(std::deque<double> samples, double ewma);

  // The first sample seeds the average; later ones blend in with `weight`
  // on the newest value.
  void record(double observed, double weight);

  std::optional<double> ewma() const;
  const std::deque<double>& samples() const { return samples_; }

  bool operator==(const RatioHistory&) const = default;

 private:
  std::deque<double> samples_;
  double ewma_ = 0;
};

struct TableDescriptor {
  std::string name;
  std::uint32_t table_id = 0;
  Schema schema;
  // Wider than 32 bits so exhaustion of the 32-bit ID space is detectable.
  std::uint64_t next_file_id = 0;
  std::uint32_t successive_reads_k = 10;
  // Live master segments, ascending file id. Replacing this list together
  // with attached_generation is the commit point of OVERWRITE and COMPACT.
  std::vector<std::uint32_t> segments;
  std::uint64_t attached_generation = 0;
  TableStats stats;
  std::map<std::uint64_t, RatioHistory> history;

  bool operator==(const TableDescriptor&) const = default;
};

struct CatalogOptions {
  double default_ratio = 0.05;
  double ewma_weight = 0.5;
  bool sync = false;
};

// Lowercase, collapse whitespace and replace literals with '?'.
std::string normalize_statement(std::string_view text);
std::uint64_t statement_key(std::string_view text);

// Metadata for every table of one database directory, persisted as
// catalog.json through write-temp-then-rename. Single writer; callers
// serialize mutation.
class Catalog {
 public:
  static constexpr std::string_view kFileName = "catalog.json";

  // Loads the catalog in `dir`, or starts an empty one when none exists.
  static Catalog open(const fs::path& dir, CatalogOptions options = {},
                      FaultInjector* fault = nullptr);

  const fs::path& dir() const { return dir_; }
  const CatalogOptions& options() const { return options_; }

  TableDescriptor& create_table(const std::string& name, Schema schema, std::uint32_t k);
  void drop_table(std::string_view name);

  TableDescriptor* find(std::string_view name);
  const TableDescriptor* find(std::string_view name) const;
  TableDescriptor& get(std::string_view name);
  const TableDescriptor& get(std::string_view name) const;
  TableDescriptor& get(std::uint32_t table_id);
  const std::vector<TableDescriptor>& tables() const { return tables_; }

  // Returns the table's next file id, persisting the incremented counter
  // before returning. An id is never handed out twice, even across crashes.
  std::uint32_t allocate_file_id(std::uint32_t table_id);

  double estimate_ratio(std::uint32_t table_id, std::uint64_t key,
                        std::optional<double> hint) const;
  void record_observed_ratio(std::uint32_t table_id, std::uint64_t key, double observed);

  const std::optional<CostParams>& cost_params() const { return cost_params_; }
  void set_cost_params(const CostParams& params);

  void save();

  std::string to_json() const;
  static Catalog from_json(std::string_view text);

  bool operator==(const Catalog& other) const {
    return tables_ == other.tables_ && cost_params_ == other.cost_params_ &&
           next_table_id_ == other.next_table_id_;
  }

 private:
  fs::path dir_;
  CatalogOptions options_;
  FaultInjector* fault_ = nullptr;
  std::vector<TableDescriptor> tables_;
  std::uint32_t next_table_id_ = 1;
  std::optional<CostParams> cost_params_;
};

}  // namespace dualtable

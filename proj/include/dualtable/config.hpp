#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include "dualtable/cost_model.hpp"
#include "dualtable/engine.hpp"

namespace dualtable {

// key=value settings. '#' starts a comment; blank lines are ignored.
// Keys: data_dir, W_M, R_M, W_A, R_A, k_default, compact_threshold,
// default_ratio, ewma_weight, segment_target_bytes, sync, auto_compact.
struct Config {
  std::filesystem::path data_dir = "dualtable_data";
  CostParams params;  // rates left at 0 are "not configured"
  EngineOptions engine;

  void set(std::string_view key, std::string_view value);
  void load(std::istream& in);
  void load_file(const std::filesystem::path& path);

  // Engine options with cost params attached when all four rates are set.
  EngineOptions engine_options() const;
};

}  // namespace dualtable

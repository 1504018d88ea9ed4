#include "dualtable/config.hpp"

#include <charconv>
#include <fstream>
#include <string>

#include "dualtable/error.hpp"

namespace dualtable {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw UserError("config " + std::string(key) + ": '" + std::string(v) + "' is not a number");
  }
  return out;
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw UserError("config " + std::string(key) + ": '" + std::string(v) +
                    "' is not a non-negative integer");
  }
  return out;
}

double parse_rate(std::string_view key, std::string_view v) {
  const double r = parse_double(key, v);
  if (!(r > 0)) throw UserError("config " + std::string(key) + ": rate must be positive");
  return r;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UserError("config " + std::string(key) + ": '" + std::string(v) + "' is not a bool");
}

}  // namespace

void Config::set(std::string_view key, std::string_view raw) {
  const auto value = trim(raw);
  if (key == "data_dir") {
    data_dir = std::string(value);
  } else if (key == "W_M") {
    params.master_write_rate = parse_rate(key, value);
  } else if (key == "R_M") {
    params.master_read_rate = parse_rate(key, value);
  } else if (key == "W_A") {
    params.attached_write_rate = parse_rate(key, value);
  } else if (key == "R_A") {
    params.attached_read_rate = parse_rate(key, value);
  } else if (key == "k_default") {
    const auto k = parse_uint(key, value);
    if (k > UINT32_MAX) throw UserError("config k_default out of range");
    engine.k_default = static_cast<std::uint32_t>(k);
    params.successive_reads_k = static_cast<double>(k);
  } else if (key == "compact_threshold") {
    engine.compact_threshold = parse_double(key, value);
  } else if (key == "default_ratio") {
    const double r = parse_double(key, value);
    if (!(r >= 0 && r <= 1)) throw UserError("config default_ratio must be in [0, 1]");
    engine.default_ratio = r;
  } else if (key == "ewma_weight") {
    const double w = parse_double(key, value);
    if (!(w > 0 && w <= 1)) throw UserError("config ewma_weight must be in (0, 1]");
    engine.ewma_weight = w;
  } else if (key == "segment_target_bytes") {
    const auto n = parse_uint(key, value);
    if (n == 0) throw UserError("config segment_target_bytes must be positive");
    engine.segment_target_bytes = n;
  } else if (key == "sync") {
    engine.sync = parse_bool(key, value);
  } else if (key == "auto_compact") {
    engine.auto_compact = parse_bool(key, value);
  } else {
    throw UserError("unknown config key '" + std::string(key) + "'");
  }
}

void Config::load(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw UserError("config line " + std::to_string(number) + ": expected key=value");
    }
    set(trim(view.substr(0, eq)), view.substr(eq + 1));
  }
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open config '" + path.string() + "'");
  load(in);
}

EngineOptions Config::engine_options() const {
  EngineOptions out = engine;
  if (params.master_write_rate > 0 && params.master_read_rate > 0 &&
      params.attached_write_rate > 0 && params.attached_read_rate > 0) {
    out.cost_params = params;
  }
  return out;
}

}  // namespace dualtable

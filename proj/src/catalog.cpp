#include "dualtable/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "dualtable/error.hpp"

namespace dualtable {

using nlohmann::json;

RatioHistory::RatioHistory(std::deque<double> samples, double ewma)
    : samples_(std::move(samples)), ewma_(ewma) {
  while (samples_.size() > kMaxSamples) samples_.pop_front();
}

void RatioHistory::record(double observed, double weight) {
  if (!(observed >= 0.0 && observed <= 1.0)) {
    throw UserError("observed ratio must be in [0, 1]");
  }
  ewma_ = samples_.empty() ? observed : weight * observed + (1 - weight) * ewma_;
  ewma_ = std::clamp(ewma_, 0.0, 1.0);
  samples_.push_back(observed);
  if (samples_.size() > kMaxSamples) samples_.pop_front();
}

std::optional<double> RatioHistory::ewma() const {
  if (samples_.empty()) return std::nullopt;
  return ewma_;
}

std::string normalize_statement(std::string_view text) {
  auto ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
  };
  std::string out;
  std::size_t i = 0;
  bool pending_space = false;
  auto emit = [&](char c) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      pending_space = true;
      ++i;
    } else if (c == '\'') {
      ++i;
      while (i < text.size()) {
        if (text[i] == '\'') {
          if (i + 1 < text.size() && text[i + 1] == '\'') {
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        ++i;
      }
      emit('?');
    } else if (std::isdigit(static_cast<unsigned char>(c)) != 0 &&
               (out.empty() || pending_space || !ident(out.back()))) {
      while (i < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[i])) != 0 || text[i] == '.')) {
        ++i;
      }
      if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])) != 0) ++i;
      }
      emit('?');
    } else {
      emit(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      ++i;
    }
  }
  return out;
}

std::uint64_t statement_key(std::string_view text) { return fnv1a64(normalize_statement(text)); }

namespace {

json params_to_json(const CostParams& p) {
  return json{{"W_M", p.master_write_rate},     {"R_M", p.master_read_rate},
              {"W_A", p.attached_write_rate},   {"R_A", p.attached_read_rate},
              {"k", p.successive_reads_k},      {"marker_size", p.marker_size}};
}

CostParams params_from_json(const json& j) {
  CostParams p;
  p.master_write_rate = j.at("W_M").get<double>();
  p.master_read_rate = j.at("R_M").get<double>();
  p.attached_write_rate = j.at("W_A").get<double>();
  p.attached_read_rate = j.at("R_A").get<double>();
  p.successive_reads_k = j.value("k", 10.0);
  p.marker_size = j.value("marker_size", 9.0);
  return p;
}

std::string key_to_hex(std::uint64_t key) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(key));
  return buf;
}

}  // namespace

std::string Catalog::to_json() const {
  json tables = json::array();
  for (const auto& t : tables_) {
    json schema = json::array();
    for (const auto& c : t.schema.columns) {
      schema.push_back({{"name", c.name}, {"type", std::string(to_string(c.type))}});
    }
    json history = json::array();
    for (const auto& [key, h] : t.history) {
      history.push_back({{"key", key_to_hex(key)},
                         {"samples", std::vector<double>(h.samples().begin(), h.samples().end())},
                         {"ewma", h.ewma().value_or(0.0)}});
    }
    tables.push_back({
        {"name", t.name},
        {"table_id", t.table_id},
        {"schema", schema},
        {"next_file_id", t.next_file_id},
        {"k", t.successive_reads_k},
        {"segments", t.segments},
        {"attached_generation", t.attached_generation},
        {"stats",
         {{"data_size", t.stats.data_size},
          {"row_count", t.stats.row_count},
          {"avg_row_size", t.stats.avg_row_size},
          {"attached_size", t.stats.attached_size},
          {"attached_entries", t.stats.attached_entries}}},
        {"history", history},
    });
  }
  json doc{{"tables", tables}, {"next_table_id", next_table_id_}};
  doc["cost_params"] = cost_params_ ? params_to_json(*cost_params_) : json::object();
  return doc.dump(2);
}

Catalog Catalog::from_json(std::string_view text) {
  Catalog cat;
  try {
    json doc = json::parse(text);
    cat.next_table_id_ = doc.value("next_table_id", 1U);
    for (const auto& jt : doc.at("tables")) {
      TableDescriptor t;
      t.name = jt.at("name").get<std::string>();
      t.table_id = jt.at("table_id").get<std::uint32_t>();
      for (const auto& jc : jt.at("schema")) {
        auto type = parse_column_type(jc.at("type").get<std::string>());
        if (!type) throw CorruptionError("catalog: unknown column type");
        t.schema.columns.push_back({jc.at("name").get<std::string>(), *type});
      }
      t.next_file_id = jt.at("next_file_id").get<std::uint64_t>();
      t.successive_reads_k = jt.value("k", 10U);
      t.segments = jt.value("segments", std::vector<std::uint32_t>{});
      t.attached_generation = jt.value("attached_generation", std::uint64_t{0});
      const auto& js = jt.at("stats");
      t.stats.data_size = js.at("data_size").get<std::uint64_t>();
      t.stats.row_count = js.at("row_count").get<std::uint64_t>();
      t.stats.avg_row_size = js.at("avg_row_size").get<double>();
      t.stats.attached_size = js.at("attached_size").get<std::uint64_t>();
      t.stats.attached_entries = js.at("attached_entries").get<std::uint64_t>();
      for (const auto& jh : jt.value("history", json::array())) {
        auto key = std::stoull(jh.at("key").get<std::string>(), nullptr, 16);
        auto samples = jh.at("samples").get<std::vector<double>>();
        t.history.emplace(key, RatioHistory(std::deque<double>(samples.begin(), samples.end()),
                                            jh.at("ewma").get<double>()));
      }
      cat.next_table_id_ = std::max(cat.next_table_id_, t.table_id + 1);
      cat.tables_.push_back(std::move(t));
    }
    const auto& jp = doc.value("cost_params", json::object());
    if (!jp.empty()) cat.cost_params_ = params_from_json(jp);
  } catch (const json::exception& e) {
    throw CorruptionError(std::string("catalog: ") + e.what());
  }
  return cat;
}

Catalog Catalog::open(const fs::path& dir, CatalogOptions options, FaultInjector* fault) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto path = dir / kFileName;
  Catalog cat;
  if (fs::exists(path)) {
    auto bytes = read_file(path);
    cat = from_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  cat.dir_ = dir;
  cat.options_ = options;
  cat.fault_ = fault;
  // A leftover temp file is an uncommitted save.
  fs::remove(fs::path(path) += ".tmp", ec);
  return cat;
}

void Catalog::save() {
  auto text = to_json();
  write_file_atomic(dir_ / kFileName,
                    std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
                    fault_, "catalog", options_.sync);
}

TableDescriptor& Catalog::create_table(const std::string& name, Schema schema, std::uint32_t k) {
  if (find(name) != nullptr) {
    throw UserError("table '" + name + "' already exists");
  }
  schema.validate();
  TableDescriptor t;
  t.name = name;
  t.table_id = next_table_id_++;
  t.schema = std::move(schema);
  t.successive_reads_k = k;
  tables_.push_back(std::move(t));
  try {
    save();
  } catch (const IoError&) {
    tables_.pop_back();
    --next_table_id_;
    throw;
  }
  return tables_.back();
}

void Catalog::drop_table(std::string_view name) {
  auto it = std::find_if(tables_.begin(), tables_.end(),
                         [&](const TableDescriptor& t) { return t.name == name; });
  if (it == tables_.end()) {
    throw UserError("unknown table '" + std::string(name) + "'");
  }
  auto removed = std::move(*it);
  auto pos = tables_.erase(it);
  try {
    save();
  } catch (const IoError&) {
    tables_.insert(pos, std::move(removed));
    throw;
  }
}

TableDescriptor* Catalog::find(std::string_view name) {
  for (auto& t : tables_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const TableDescriptor* Catalog::find(std::string_view name) const {
  return const_cast<Catalog*>(this)->find(name);
}

TableDescriptor& Catalog::get(std::string_view name) {
  if (auto* t = find(name)) return *t;
  throw UserError("unknown table '" + std::string(name) + "'");
}

const TableDescriptor& Catalog::get(std::string_view name) const {
  return const_cast<Catalog*>(this)->get(name);
}

TableDescriptor& Catalog::get(std::uint32_t table_id) {
  for (auto& t : tables_) {
    if (t.table_id == table_id) return t;
  }
  throw UserError("unknown table id " + std::to_string(table_id));
}

std::uint32_t Catalog::allocate_file_id(std::uint32_t table_id) {
  auto& t = get(table_id);
  if (t.next_file_id > std::numeric_limits<std::uint32_t>::max()) {
    throw UserError("table '" + t.name + "' exhausted its file id space");
  }
  auto id = static_cast<std::uint32_t>(t.next_file_id);
  ++t.next_file_id;
  // Persist before the id is used so a crash can only burn it.
  try {
    save();
  } catch (const IoError&) {
    --t.next_file_id;
    throw;
  }
  return id;
}

double Catalog::estimate_ratio(std::uint32_t table_id, std::uint64_t key,
                               std::optional<double> hint) const {
  if (hint) {
    if (!(*hint >= 0.0 && *hint <= 1.0)) {
      throw UserError("ratio hint must be in [0, 1]");
    }
    return *hint;
  }
  const auto& t = const_cast<Catalog*>(this)->get(table_id);
  if (auto it = t.history.find(key); it != t.history.end()) {
    if (auto e = it->second.ewma()) return *e;
  }
  return options_.default_ratio;
}

void Catalog::record_observed_ratio(std::uint32_t table_id, std::uint64_t key, double observed) {
  auto& t = get(table_id);
  t.history[key].record(observed, options_.ewma_weight);
  save();
}

void Catalog::set_cost_params(const CostParams& params) {
  params.validate();
  cost_params_ = params;
}

}  // namespace dualtable

#include "dualtable/attached_store.hpp"

#include <bit>
#include <set>

#include "dualtable/bytes.hpp"
#include "dualtable/error.hpp"

namespace dualtable {

namespace {

enum RecordKind : std::uint8_t {
  kPatchRecord = 0,
  kMarkerRecord = 1,
  kBeginRecord = 2,
  kCommitRecord = 3,
  kEpochRecord = 4,
};

constexpr std::uint32_t kNullLength = 0xFFFFFFFF;

void encode_value(const Value& v, Bytes& out) {
  if (is_null(v)) {
    put_u32(out, kNullLength);
    return;
  }
  put_u32(out, static_cast<std::uint32_t>(payload_size(v)));
  switch (v.index()) {
    case 1:
      put_u64(out, static_cast<std::uint64_t>(std::get<std::int64_t>(v)));
      break;
    case 2:
      put_u64(out, std::bit_cast<std::uint64_t>(std::get<double>(v)));
      break;
    case 3:
      put_bytes(out, std::get<std::string>(v));
      break;
    case 4:
      put_u8(out, std::get<bool>(v) ? 1 : 0);
      break;
    default:
      break;
  }
}

Value decode_value(ByteReader& r, ColumnType type) {
  auto len = r.u32();
  if (len == kNullLength) return std::monostate{};
  auto payload = r.bytes(len);
  ByteReader p(payload);
  switch (type) {
    case ColumnType::kInt64:
      if (len != 8) break;
      return static_cast<std::int64_t>(p.u64());
    case ColumnType::kFloat64:
      if (len != 8) break;
      return std::bit_cast<double>(p.u64());
    case ColumnType::kUtf8:
      return std::string(reinterpret_cast<const char*>(payload.data()), payload.size());
    case ColumnType::kBool:
      if (len != 1) break;
      return payload[0] != 0;
  }
  throw CorruptionError("journal: bad cell width");
}

void append_record(Bytes& out, std::uint8_t kind, std::uint64_t id, const Bytes& payload) {
  const std::size_t start = out.size();
  put_u32(out, static_cast<std::uint32_t>(8 + 1 + payload.size()));
  put_u64(out, id);
  put_u8(out, kind);
  put_bytes(out, payload);
  auto body = std::span<const std::uint8_t>(out).subspan(start + 4);
  put_u32(out, crc32(body));
}

Bytes encode_entry(const DeltaEntry& e) {
  Bytes record;
  Bytes payload;
  if (!e.is_delete()) {
    put_u16(payload, static_cast<std::uint16_t>(e.patches.size()));
    for (const auto& [ordinal, value] : e.patches) {
      put_u16(payload, ordinal);
      encode_value(value, payload);
    }
  }
  append_record(record, e.is_delete() ? kMarkerRecord : kPatchRecord, e.record_id.packed(),
                payload);
  return record;
}

}  // namespace

std::size_t patch_cell_size(const Value& v) { return 2 + 4 + payload_size(v); }

std::size_t patch_entry_size(const PatchMap& patches) {
  std::size_t size = kDeltaKeyOverhead + 2;
  for (const auto& [ordinal, value] : patches) size += patch_cell_size(value);
  return size;
}

void merge_delta(DeltaMap& map, const DeltaEntry& update) {
  auto it = map.find(update.record_id);
  if (update.is_delete()) {
    if (it == map.end()) {
      map.emplace(update.record_id, update);
    } else {
      it->second = update;
    }
    return;
  }
  if (it == map.end()) {
    map.emplace(update.record_id, update);
    return;
  }
  if (it->second.is_delete()) {
    throw UserError("cannot patch deleted record " + std::to_string(update.record_id.packed()));
  }
  for (const auto& [ordinal, value] : update.patches) it->second.patches[ordinal] = value;
}

DeltaCursor::DeltaCursor(DeltaSnapshot snapshot, RecordId lo, std::optional<RecordId> hi,
                         IoCounters* counters)
    : snapshot_(std::move(snapshot)), counters_(counters) {
  it_ = snapshot_->lower_bound(lo);
  end_ = hi ? snapshot_->lower_bound(*hi) : snapshot_->end();
  if (hi && *hi < lo) end_ = it_;
}

const DeltaEntry* DeltaCursor::peek() const { return it_ == end_ ? nullptr : &it_->second; }

const DeltaEntry* DeltaCursor::next() {
  if (it_ == end_) return nullptr;
  const DeltaEntry* e = &it_->second;
  ++it_;
  if (counters_ != nullptr) {
    counters_->attached_read += e->logical_size();
    counters_->attached_entries_read += 1;
  }
  return e;
}

void DeltaCursor::skip_below(RecordId id) {
  while (it_ != end_ && it_->first < id) ++it_;
}

AttachedStore::AttachedStore(fs::path journal_path, Schema schema, IoCounters& counters,
                             FaultInjector* fault, bool sync)
    : path_(std::move(journal_path)),
      schema_(std::move(schema)),
      counters_(counters),
      fault_(fault),
      sync_(sync),
      map_(std::make_shared<DeltaMap>()) {}

std::optional<std::uint64_t> AttachedStore::recover() {
  std::lock_guard lock(mu_);
  auto map = std::make_shared<DeltaMap>();
  std::optional<std::uint64_t> generation;
  std::size_t valid_end = 0;
  std::uint64_t last_statement = 0;
  bool any_statement = false;

  Bytes data;
  if (fs::exists(path_)) data = read_file(path_);

  std::size_t pos = 0;
  std::vector<DeltaEntry> pending;
  bool in_statement = false;
  while (pos + 4 <= data.size()) {
    ByteReader head(std::span<const std::uint8_t>(data).subspan(pos, 4));
    const std::uint32_t len = head.u32();
    if (len < 9 || pos + 4 + len + 4 > data.size()) break;
    auto body = std::span<const std::uint8_t>(data).subspan(pos + 4, len);
    ByteReader crc_reader(std::span<const std::uint8_t>(data).subspan(pos + 4 + len, 4));
    if (crc_reader.u32() != crc32(body)) break;
    ByteReader r(body);
    const std::uint64_t id = r.u64();
    const std::uint8_t kind = r.u8();
    pos += 4 + len + 4;

    if (!generation) {
      if (kind != kEpochRecord) break;
      generation = id;
      valid_end = pos;
      continue;
    }
    switch (kind) {
      case kBeginRecord:
        pending.clear();
        in_statement = true;
        break;
      case kCommitRecord:
        if (in_statement) {
          for (const auto& e : pending) merge_delta(*map, e);
          pending.clear();
          in_statement = false;
          last_statement = id;
          any_statement = true;
          valid_end = pos;
        }
        break;
      case kPatchRecord: {
        DeltaEntry e = DeltaEntry::patch(RecordId::from_packed(id), {});
        const std::uint16_t count = r.u16();
        for (std::uint16_t i = 0; i < count; ++i) {
          const std::uint16_t ordinal = r.u16();
          if (ordinal >= schema_.size()) throw CorruptionError("journal: bad column ordinal");
          e.patches[ordinal] = decode_value(r, schema_.columns[ordinal].type);
        }
        if (in_statement) pending.push_back(std::move(e));
        break;
      }
      case kMarkerRecord:
        if (in_statement) pending.push_back(DeltaEntry::marker(RecordId::from_packed(id)));
        break;
      default:
        throw CorruptionError("journal: unknown record kind");
    }
  }

  map_ = std::move(map);
  size_bytes_ = 0;
  for (const auto& [id, e] : *map_) size_bytes_ += e.logical_size();
  generation_ = generation.value_or(0);
  next_statement_ = any_statement ? last_statement + 1 : 0;

  if (!generation) {
    journal_ = AppendFile();
    return std::nullopt;
  }
  journal_ = AppendFile(path_);
  // Drop the torn tail and any unterminated statement.
  if (journal_.size() != valid_end) journal_.truncate(valid_end);
  return generation;
}

void AttachedStore::validate(const DeltaEntry& entry) const {
  if (entry.is_delete()) {
    if (!entry.patches.empty()) throw UserError("delete marker cannot carry patches");
    return;
  }
  if (entry.patches.empty()) throw UserError("patch must set at least one column");
  for (const auto& [ordinal, value] : entry.patches) {
    if (ordinal >= schema_.size()) {
      throw UserError("patch column ordinal " + std::to_string(ordinal) + " out of range");
    }
    if (!value_matches(value, schema_.columns[ordinal].type)) {
      throw UserError("patch value '" + format_value(value) + "' does not match column '" +
                      schema_.columns[ordinal].name + "'");
    }
  }
}

void AttachedStore::put_patch(RecordId id, PatchMap patches) {
  DeltaEntry e = DeltaEntry::patch(id, std::move(patches));
  apply(std::span(&e, 1));
}

void AttachedStore::put_delete_marker(RecordId id) {
  DeltaEntry e = DeltaEntry::marker(id);
  apply(std::span(&e, 1));
}

void AttachedStore::apply(std::span<const DeltaEntry> batch) {
  if (batch.empty()) return;
  std::lock_guard lock(mu_);
  if (!journal_.is_open()) {
    throw IoError("attached journal " + path_.string() + " is not open");
  }

  std::set<RecordId> deleted_in_batch;
  for (const auto& e : batch) {
    validate(e);
    if (e.is_delete()) {
      deleted_in_batch.insert(e.record_id);
    } else {
      bool deleted = deleted_in_batch.count(e.record_id) > 0;
      if (!deleted) {
        auto it = map_->find(e.record_id);
        deleted = it != map_->end() && it->second.is_delete();
      }
      if (deleted) {
        throw UserError("cannot patch deleted record " + std::to_string(e.record_id.packed()));
      }
    }
  }

  const std::uint64_t seq = next_statement_;
  Bytes begin;
  append_record(begin, kBeginRecord, seq, {});
  journal_.append(begin, fault_, "journal.begin");
  std::uint64_t written = 0;
  for (const auto& e : batch) {
    journal_.append(encode_entry(e), fault_, "journal.entry");
    written += e.logical_size();
  }
  Bytes commit;
  append_record(commit, kCommitRecord, seq, {});
  journal_.append(commit, fault_, "journal.commit");
  if (sync_) journal_.sync();
  ++next_statement_;
  counters_.attached_written += written;

  // Readers holding the current map keep it; mutate a private copy then.
  std::shared_ptr<DeltaMap> target;
  if (map_.use_count() == 1) {
    target = std::const_pointer_cast<DeltaMap>(map_);
  } else {
    target = std::make_shared<DeltaMap>(*map_);
  }
  for (const auto& e : batch) {
    auto it = target->find(e.record_id);
    if (it != target->end()) size_bytes_ -= it->second.logical_size();
    merge_delta(*target, e);
    size_bytes_ += target->at(e.record_id).logical_size();
  }
  map_ = std::move(target);
}

DeltaCursor AttachedStore::scan_deltas(RecordId lo, std::optional<RecordId> hi) const {
  return DeltaCursor(snapshot(), lo, hi, &counters_);
}

DeltaSnapshot AttachedStore::snapshot() const {
  std::lock_guard lock(mu_);
  return map_;
}

void AttachedStore::clear(std::uint64_t generation) {
  std::lock_guard lock(mu_);
  // The in-memory view empties first; if the journal cannot be restarted it
  // stays closed and further writes fail.
  journal_ = AppendFile();
  map_ = std::make_shared<DeltaMap>();
  size_bytes_ = 0;
  generation_ = generation;
  next_statement_ = 0;
  Bytes header;
  append_record(header, kEpochRecord, generation, {});
  write_file_atomic(path_, header, fault_, "journal.reset", sync_);
  journal_ = AppendFile(path_);
}

std::uint64_t AttachedStore::size_bytes() const {
  std::lock_guard lock(mu_);
  return size_bytes_;
}

std::size_t AttachedStore::entry_count() const {
  std::lock_guard lock(mu_);
  return map_->size();
}

std::uint64_t AttachedStore::generation() const {
  std::lock_guard lock(mu_);
  return generation_;
}

}  // namespace dualtable

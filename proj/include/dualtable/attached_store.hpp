#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "dualtable/io.hpp"
#include "dualtable/record_id.hpp"
#include "dualtable/value.hpp"

namespace dualtable {

enum class DeltaKind : std::uint8_t { kPatch = 0, kDeleteMarker = 1 };

using PatchMap = std::map<std::uint16_t, Value>;

// Logical sizes: every entry carries an 8-byte key and a 1-byte kind tag; a
// patch adds a u16 cell count and per cell a u16 ordinal, u32 length and
// payload. A delete marker is therefore exactly kMarkerSize bytes.
inline constexpr std::size_t kDeltaKeyOverhead = 8 + 1;
inline constexpr std::size_t kMarkerSize = kDeltaKeyOverhead;

std::size_t patch_cell_size(const Value& v);
std::size_t patch_entry_size(const PatchMap& patches);

struct DeltaEntry {
  RecordId record_id;
  DeltaKind kind = DeltaKind::kPatch;
  PatchMap patches;  // empty for delete markers

  static DeltaEntry patch(RecordId id, PatchMap patches) {
    return {id, DeltaKind::kPatch, std::move(patches)};
  }
  static DeltaEntry marker(RecordId id) { return {id, DeltaKind::kDeleteMarker, {}}; }

  bool is_delete() const { return kind == DeltaKind::kDeleteMarker; }
  std::size_t logical_size() const {
    return is_delete() ? kMarkerSize : patch_entry_size(patches);
  }

  bool operator==(const DeltaEntry&) const = default;
};

using DeltaMap = std::map<RecordId, DeltaEntry>;
using DeltaSnapshot = std::shared_ptr<const DeltaMap>;

// Folds `update` into the visible entry for its record id: patches merge
// column-wise, a marker replaces everything. Throws UserError for a patch on
// a deleted record.
void merge_delta(DeltaMap& map, const DeltaEntry& update);

// Visible entries of a snapshot with ids in [lo, hi), ascending. `hi` empty
// means unbounded. Each yielded entry is charged to attached_read.
class DeltaCursor {
 public:
  DeltaCursor(DeltaSnapshot snapshot, RecordId lo, std::optional<RecordId> hi,
              IoCounters* counters);

  // Entry under the cursor without consuming it (not yet charged).
  const DeltaEntry* peek() const;
  // Consumes and returns the next entry; valid while the cursor lives.
  const DeltaEntry* next();
  // Advance past every entry below `id` without yielding them.
  void skip_below(RecordId id);

 private:
  DeltaSnapshot snapshot_;
  DeltaMap::const_iterator it_;
  DeltaMap::const_iterator end_;
  IoCounters* counters_;
};

// The random-write delta store of one table: an ordered in-memory map backed
// by a CRC-framed append-only journal.
//
// Journal record: u32 len | u64 record_id | u8 kind | payload | u32 crc,
// where len covers id, kind and payload and the CRC covers the same bytes.
// Kinds 0 and 1 are patches and markers; 2/3 bracket one statement (the id
// field holds a sequence number) and 4 opens the journal with the
// generation it belongs to. Replay applies only bracketed batches that were
// closed, and stops at the first torn record.
class AttachedStore {
 public:
  AttachedStore(fs::path journal_path, Schema schema, IoCounters& counters,
                FaultInjector* fault = nullptr, bool sync = false);

  // Replays the journal. Returns the generation stamped in it, or nothing if
  // the journal is missing or has no valid header.
  std::optional<std::uint64_t> recover();

  void put_patch(RecordId id, PatchMap patches);
  void put_delete_marker(RecordId id);

  // Applies all entries as one statement: either every entry survives a
  // crash or none does. Validation happens before anything is written.
  void apply(std::span<const DeltaEntry> batch);

  DeltaCursor scan_deltas(RecordId lo, std::optional<RecordId> hi) const;
  DeltaSnapshot snapshot() const;

  // Empties the store and restarts the journal for `generation`.
  void clear(std::uint64_t generation);

  std::uint64_t size_bytes() const;
  std::size_t entry_count() const;
  std::uint64_t generation() const;
  const fs::path& journal_path() const { return path_; }

 private:
  void validate(const DeltaEntry& entry) const;
  void open_for_append();

  fs::path path_;
  Schema schema_;
  IoCounters& counters_;
  FaultInjector* fault_;
  bool sync_;

  mutable std::mutex mu_;
  DeltaSnapshot map_;
  std::uint64_t size_bytes_ = 0;
  std::uint64_t generation_ = 0;
  std::uint64_t next_statement_ = 0;
  AppendFile journal_;
};

}  // namespace dualtable

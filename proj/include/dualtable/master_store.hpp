#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dualtable/bytes.hpp"
#include "dualtable/io.hpp"
#include "dualtable/record_id.hpp"
#include "dualtable/value.hpp"

namespace dualtable {

// Segment file layout (all integers big-endian):
//   "DTBL" | u16 version | u32 table_id | u32 file_id | u64 row_count |
//   u64 schema_digest | rows... | u32 crc32(everything before)
// Each row: null bitmap (bit set = NULL), then for every non-null cell a
// u32 length and the payload.
inline constexpr std::uint8_t kSegmentMagic[4] = {'D', 'T', 'B', 'L'};
inline constexpr std::uint16_t kSegmentVersion = 1;
inline constexpr std::size_t kSegmentHeaderSize = 4 + 2 + 4 + 4 + 8 + 8;
inline constexpr std::size_t kSegmentTrailerSize = 4;
inline constexpr std::uint64_t kDefaultSegmentTargetBytes = 64ULL << 20;

struct SegmentHandle {
  std::uint32_t table_id = 0;
  std::uint32_t file_id = 0;
  std::uint64_t row_count = 0;
  std::uint64_t file_size = 0;
  fs::path path;

  RecordId first_id() const { return RecordId::segment_begin(file_id); }
};

fs::path segment_path(const fs::path& dir, std::uint32_t table_id, std::uint32_t file_id);

// Bytes a row occupies inside a segment (bitmap + length prefixes + payload).
std::size_t encoded_row_size(const Row& row);
void encode_row(const Row& row, Bytes& out);

// A segment owned by a table. When a swap retires it, the file is removed
// once the last reader drops its reference.
class SegmentFile {
 public:
  explicit SegmentFile(SegmentHandle handle) : handle_(std::move(handle)) {}
  ~SegmentFile();
  SegmentFile(const SegmentFile&) = delete;
  SegmentFile& operator=(const SegmentFile&) = delete;

  const SegmentHandle& handle() const { return handle_; }
  void mark_obsolete() const { obsolete_ = true; }

 private:
  SegmentHandle handle_;
  mutable std::atomic<bool> obsolete_{false};
};

using SegmentRef = std::shared_ptr<const SegmentFile>;

// Writes one immutable segment holding `rows`. Rows are checked against the
// schema first; a failed write leaves no file behind.
SegmentHandle write_segment(const fs::path& dir, std::uint32_t table_id, std::uint32_t file_id,
                            const Schema& schema, std::span<const Row> rows,
                            IoCounters& counters, FaultInjector* fault = nullptr,
                            bool sync = false);

// Reads and validates the header and trailer of an existing segment.
SegmentHandle open_segment(const fs::path& path, const Schema& schema);

struct ScannedRow {
  RecordId record_id;
  Row row;
};

// Streams the rows of one segment in physical order. The whole file is
// validated (magic, version, digest, CRC) before the first row is produced.
class SegmentScanner {
 public:
  SegmentScanner(const SegmentHandle& handle, const Schema& schema,
                 std::optional<std::vector<std::size_t>> projection, IoCounters& counters);

  std::optional<ScannedRow> next();
  const SegmentHandle& handle() const { return handle_; }

 private:
  SegmentHandle handle_;
  std::size_t columns_ = 0;
  std::optional<std::vector<std::size_t>> projection_;
  std::vector<ColumnType> types_;
  Bytes data_;
  std::size_t pos_ = 0;
  std::uint64_t row_ = 0;
};

// Concatenation of segment scans in ascending file id order.
class TableScanner {
 public:
  TableScanner(std::vector<SegmentHandle> segments, const Schema& schema,
               std::optional<std::vector<std::size_t>> projection, IoCounters& counters);

  std::optional<ScannedRow> next();

 private:
  std::vector<SegmentHandle> segments_;
  Schema schema_;
  std::optional<std::vector<std::size_t>> projection_;
  IoCounters* counters_;
  std::size_t index_ = 0;
  std::optional<SegmentScanner> current_;
};

TableScanner scan_table(std::span<const SegmentRef> segments, const Schema& schema,
                        std::optional<std::vector<std::size_t>> projection,
                        IoCounters& counters);

// Streams rows into new segments, cutting a new file whenever the encoded
// size reaches the target. File ids come from `allocate` (the catalog).
class SegmentSetWriter {
 public:
  using Allocator = std::function<std::uint32_t()>;

  SegmentSetWriter(fs::path dir, std::uint32_t table_id, const Schema& schema,
                   Allocator allocate, IoCounters& counters, FaultInjector* fault = nullptr,
                   std::uint64_t target_bytes = kDefaultSegmentTargetBytes, bool sync = false);
  ~SegmentSetWriter();
  SegmentSetWriter(const SegmentSetWriter&) = delete;
  SegmentSetWriter& operator=(const SegmentSetWriter&) = delete;

  void append(Row row);
  // Flushes the tail segment; an empty stream produces no segments.
  std::vector<SegmentHandle> finish();
  // Removes every file written so far.
  void abort() noexcept;
  // Leaves written files in place (as a crashed process would).
  void disown() noexcept { finished_ = true; }

 private:
  void flush();

  fs::path dir_;
  std::uint32_t table_id_;
  const Schema& schema_;
  Allocator allocate_;
  IoCounters& counters_;
  FaultInjector* fault_;
  std::uint64_t target_bytes_;
  bool sync_;
  Bytes body_;
  std::uint64_t body_rows_ = 0;
  std::vector<SegmentHandle> written_;
  bool finished_ = false;
};

}  // namespace dualtable

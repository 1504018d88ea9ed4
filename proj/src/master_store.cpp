#include "dualtable/master_store.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "dualtable/error.hpp"

namespace dualtable {

fs::path segment_path(const fs::path& dir, std::uint32_t table_id, std::uint32_t file_id) {
  return dir / ("t" + std::to_string(table_id) + "_f" + std::to_string(file_id) + ".dtb");
}

std::size_t encoded_row_size(const Row& row) {
  std::size_t size = (row.size() + 7) / 8;
  for (const auto& v : row) {
    if (!is_null(v)) size += 4 + payload_size(v);
  }
  return size;
}

void encode_row(const Row& row, Bytes& out) {
  const std::size_t bitmap_at = out.size();
  out.resize(out.size() + (row.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < row.size(); ++i) {
    const auto& v = row[i];
    if (is_null(v)) {
      out[bitmap_at + i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
      continue;
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
}

namespace {

Bytes make_header(std::uint32_t table_id, std::uint32_t file_id, std::uint64_t row_count,
                  std::uint64_t digest) {
  Bytes out;
  out.reserve(kSegmentHeaderSize);
  put_bytes(out, std::span<const std::uint8_t>(kSegmentMagic, 4));
  put_u16(out, kSegmentVersion);
  put_u32(out, table_id);
  put_u32(out, file_id);
  put_u64(out, row_count);
  put_u64(out, digest);
  return out;
}

struct Header {
  std::uint32_t table_id;
  std::uint32_t file_id;
  std::uint64_t row_count;
  std::uint64_t digest;
};

Header parse_header(std::span<const std::uint8_t> data, const fs::path& path) {
  if (data.size() < kSegmentHeaderSize) {
    throw CorruptionError("segment " + path.string() + ": truncated header");
  }
  if (std::memcmp(data.data(), kSegmentMagic, 4) != 0) {
    throw CorruptionError("segment " + path.string() + ": bad magic");
  }
  ByteReader r(data.subspan(4, kSegmentHeaderSize - 4));
  if (auto version = r.u16(); version != kSegmentVersion) {
    throw CorruptionError("segment " + path.string() + ": unsupported version " +
                          std::to_string(version));
  }
  Header h{};
  h.table_id = r.u32();
  h.file_id = r.u32();
  h.row_count = r.u64();
  h.digest = r.u64();
  return h;
}

Value decode_cell(ByteReader& r, ColumnType type) {
  auto len = r.u32();
  auto payload = r.bytes(len);
  auto fixed = [&](std::size_t want) {
    if (len != want) throw CorruptionError("segment: bad cell width");
  };
  switch (type) {
    case ColumnType::kInt64: {
      fixed(8);
      ByteReader p(payload);
      return static_cast<std::int64_t>(p.u64());
    }
    case ColumnType::kFloat64: {
      fixed(8);
      ByteReader p(payload);
      return std::bit_cast<double>(p.u64());
    }
    case ColumnType::kUtf8:
      return std::string(reinterpret_cast<const char*>(payload.data()), payload.size());
    case ColumnType::kBool:
      fixed(1);
      return payload[0] != 0;
  }
  throw CorruptionError("segment: bad column type");
}

void write_segment_body(const SegmentHandle& h, std::uint64_t digest, const Bytes& body,
                        IoCounters& counters, FaultInjector* fault, bool sync) {
  Bytes file = make_header(h.table_id, h.file_id, h.row_count, digest);
  file.reserve(file.size() + body.size() + kSegmentTrailerSize);
  put_bytes(file, body);
  put_u32(file, crc32(file));
  try {
    write_file(h.path, file, fault, "segment.write", sync);
  } catch (const SimulatedCrash&) {
    throw;
  } catch (...) {
    std::error_code ec;
    fs::remove(h.path, ec);
    throw;
  }
  counters.master_written += file.size();
}

}  // namespace

SegmentFile::~SegmentFile() {
  if (obsolete_) {
    std::error_code ec;
    fs::remove(handle_.path, ec);
  }
}

SegmentHandle write_segment(const fs::path& dir, std::uint32_t table_id, std::uint32_t file_id,
                            const Schema& schema, std::span<const Row> rows, IoCounters& counters,
                            FaultInjector* fault, bool sync) {
  if (rows.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw UserError("segment cannot hold more than 2^32 rows");
  }
  Bytes body;
  for (const auto& row : rows) {
    schema.check_row(row);
    encode_row(row, body);
  }
  SegmentHandle h;
  h.table_id = table_id;
  h.file_id = file_id;
  h.row_count = rows.size();
  h.path = segment_path(dir, table_id, file_id);
  h.file_size = kSegmentHeaderSize + body.size() + kSegmentTrailerSize;
  write_segment_body(h, schema.digest(), body, counters, fault, sync);
  return h;
}

SegmentHandle open_segment(const fs::path& path, const Schema& schema) {
  std::error_code ec;
  auto size = fs::file_size(path, ec);
  if (ec) throw IoError("cannot stat segment " + path.string() + ": " + ec.message());
  std::uint8_t buf[kSegmentHeaderSize];
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) throw IoError("cannot open segment " + path.string());
  auto got = std::fread(buf, 1, sizeof(buf), f);
  std::fclose(f);
  auto h = parse_header(std::span<const std::uint8_t>(buf, got), path);
  if (h.digest != schema.digest()) {
    throw CorruptionError("segment " + path.string() + ": schema digest mismatch");
  }
  if (size < kSegmentHeaderSize + kSegmentTrailerSize) {
    throw CorruptionError("segment " + path.string() + ": truncated");
  }
  return {h.table_id, h.file_id, h.row_count, size, path};
}

SegmentScanner::SegmentScanner(const SegmentHandle& handle, const Schema& schema,
                               std::optional<std::vector<std::size_t>> projection,
                               IoCounters& counters)
    : handle_(handle), columns_(schema.size()), projection_(std::move(projection)) {
  for (const auto& c : schema.columns) types_.push_back(c.type);
  if (projection_) {
    for (auto col : *projection_) {
      if (col >= columns_) throw UserError("projection column out of range");
    }
  }
  data_ = read_file(handle_.path);
  counters.master_read += data_.size();
  const auto& path = handle_.path;
  auto h = parse_header(data_, path);
  if (data_.size() < kSegmentHeaderSize + kSegmentTrailerSize) {
    throw CorruptionError("segment " + path.string() + ": truncated");
  }
  const std::size_t body_end = data_.size() - kSegmentTrailerSize;
  ByteReader trailer(std::span<const std::uint8_t>(data_).subspan(body_end));
  if (trailer.u32() != crc32(std::span<const std::uint8_t>(data_).first(body_end))) {
    throw CorruptionError("segment " + path.string() + ": checksum mismatch");
  }
  if (h.digest != schema.digest()) {
    throw CorruptionError("segment " + path.string() + ": schema digest mismatch");
  }
  if (h.file_id != handle_.file_id || h.table_id != handle_.table_id ||
      h.row_count != handle_.row_count) {
    throw CorruptionError("segment " + path.string() + ": header does not match manifest");
  }
  data_.resize(body_end);
  pos_ = kSegmentHeaderSize;
}

std::optional<ScannedRow> SegmentScanner::next() {
  if (row_ == handle_.row_count) {
    if (pos_ != data_.size()) {
      throw CorruptionError("segment " + handle_.path.string() + ": trailing bytes");
    }
    return std::nullopt;
  }
  ByteReader r(std::span<const std::uint8_t>(data_).subspan(pos_));
  auto bitmap = r.bytes((columns_ + 7) / 8);
  auto null_at = [&](std::size_t i) { return (bitmap[i / 8] >> (i % 8)) & 1U; };
  ScannedRow out{RecordId(handle_.file_id, static_cast<std::uint32_t>(row_)), {}};
  if (!projection_) {
    out.row.resize(columns_);
    for (std::size_t i = 0; i < columns_; ++i) {
      if (!null_at(i)) out.row[i] = decode_cell(r, types_[i]);
    }
  } else {
    Row full(columns_);
    for (std::size_t i = 0; i < columns_; ++i) {
      if (!null_at(i)) full[i] = decode_cell(r, types_[i]);
    }
    out.row.reserve(projection_->size());
    for (auto col : *projection_) out.row.push_back(std::move(full[col]));
  }
  pos_ += r.position();
  ++row_;
  return out;
}

TableScanner::TableScanner(std::vector<SegmentHandle> segments, const Schema& schema,
                           std::optional<std::vector<std::size_t>> projection,
                           IoCounters& counters)
    : segments_(std::move(segments)),
      schema_(schema),
      projection_(std::move(projection)),
      counters_(&counters) {
  std::sort(segments_.begin(), segments_.end(),
            [](const SegmentHandle& a, const SegmentHandle& b) { return a.file_id < b.file_id; });
}

std::optional<ScannedRow> TableScanner::next() {
  while (true) {
    if (!current_) {
      if (index_ == segments_.size()) return std::nullopt;
      current_.emplace(segments_[index_++], schema_, projection_, *counters_);
    }
    if (auto row = current_->next()) return row;
    current_.reset();
  }
}

TableScanner scan_table(std::span<const SegmentRef> segments, const Schema& schema,
                        std::optional<std::vector<std::size_t>> projection,
                        IoCounters& counters) {
  std::vector<SegmentHandle> handles;
  handles.reserve(segments.size());
  for (const auto& s : segments) handles.push_back(s->handle());
  return TableScanner(std::move(handles), schema, std::move(projection), counters);
}

SegmentSetWriter::SegmentSetWriter(fs::path dir, std::uint32_t table_id, const Schema& schema,
                                   Allocator allocate, IoCounters& counters,
                                   FaultInjector* fault, std::uint64_t target_bytes, bool sync)
    : dir_(std::move(dir)),
      table_id_(table_id),
      schema_(schema),
      allocate_(std::move(allocate)),
      counters_(counters),
      fault_(fault),
      target_bytes_(target_bytes == 0 ? 1 : target_bytes),
      sync_(sync) {}

SegmentSetWriter::~SegmentSetWriter() {
  if (!finished_) abort();
}

void SegmentSetWriter::append(Row row) {
  schema_.check_row(row);
  encode_row(row, body_);
  ++body_rows_;
  if (body_.size() >= target_bytes_ || body_rows_ == std::numeric_limits<std::uint32_t>::max()) {
    flush();
  }
}

void SegmentSetWriter::flush() {
  if (body_rows_ == 0) return;
  SegmentHandle h;
  h.table_id = table_id_;
  h.file_id = allocate_();
  h.row_count = body_rows_;
  h.path = segment_path(dir_, table_id_, h.file_id);
  h.file_size = kSegmentHeaderSize + body_.size() + kSegmentTrailerSize;
  write_segment_body(h, schema_.digest(), body_, counters_, fault_, sync_);
  written_.push_back(std::move(h));
  body_.clear();
  body_rows_ = 0;
}

std::vector<SegmentHandle> SegmentSetWriter::finish() {
  flush();
  finished_ = true;
  return written_;
}

void SegmentSetWriter::abort() noexcept {
  for (const auto& h : written_) {
    std::error_code ec;
    fs::remove(h.path, ec);
  }
  written_.clear();
  finished_ = true;
}

}  // namespace dualtable

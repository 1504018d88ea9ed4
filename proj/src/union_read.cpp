#include "dualtable/union_read.hpp"

#include <limits>

#include "dualtable/error.hpp"

namespace dualtable {

namespace {

std::vector<SegmentHandle> handles_of(const std::vector<SegmentRef>& segments) {
  std::vector<SegmentHandle> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(s->handle());
  return out;
}

}  // namespace

UnionReader::UnionReader(const TableSnapshot& snapshot, std::vector<SegmentRef> segments,
                         RecordId lo, std::optional<RecordId> hi, Projection projection,
                         RowPredicate predicate, IoCounters& counters)
    : keep_alive_(std::move(segments)),
      master_(handles_of(keep_alive_), snapshot.schema, std::nullopt, counters),
      deltas_(snapshot.deltas ? snapshot.deltas : std::make_shared<const DeltaMap>(), lo, hi,
              &counters),
      projection_(std::move(projection)),
      predicate_(std::move(predicate)) {
  if (projection_) {
    for (auto col : *projection_) {
      if (col >= snapshot.schema.size()) throw UserError("projection column out of range");
    }
  }
}

std::optional<MergedRow> UnionReader::next() {
  while (auto scanned = master_.next()) {
    deltas_.skip_below(scanned->record_id);
    const DeltaEntry* delta = deltas_.peek();
    if (delta != nullptr && delta->record_id == scanned->record_id) {
      delta = deltas_.next();
      if (delta->is_delete()) continue;
      for (const auto& [ordinal, value] : delta->patches) scanned->row[ordinal] = value;
    }
    if (predicate_ && !predicate_(scanned->row)) continue;
    MergedRow out{scanned->record_id, {}};
    if (projection_) {
      out.row.reserve(projection_->size());
      for (auto col : *projection_) out.row.push_back(scanned->row[col]);
    } else {
      out.row = std::move(scanned->row);
    }
    return out;
  }
  return std::nullopt;
}

UnionReader union_read(const TableSnapshot& snapshot, Projection projection,
                       RowPredicate predicate, IoCounters& counters) {
  return UnionReader(snapshot, snapshot.segments, RecordId(), std::nullopt,
                     std::move(projection), std::move(predicate), counters);
}

UnionReader union_read_partition(const TableSnapshot& snapshot, const SegmentRef& segment,
                                 Projection projection, RowPredicate predicate,
                                 IoCounters& counters) {
  const auto file_id = segment->handle().file_id;
  std::optional<RecordId> hi;
  if (file_id != std::numeric_limits<std::uint32_t>::max()) {
    hi = RecordId::segment_begin(file_id + 1);
  }
  return UnionReader(snapshot, {segment}, RecordId::segment_begin(file_id), hi,
                     std::move(projection), std::move(predicate), counters);
}

}  // namespace dualtable

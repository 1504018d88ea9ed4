#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dualtable/attached_store.hpp"
#include "dualtable/master_store.hpp"

namespace dualtable {

using RowPredicate = std::function<bool(const Row&)>;
using Projection = std::optional<std::vector<std::size_t>>;

struct MergedRow {
  RecordId record_id;
  Row row;

  bool operator==(const MergedRow&) const = default;
};

// Consistent view of a table: its live segments and a delta snapshot.
struct TableSnapshot {
  Schema schema;
  std::vector<SegmentRef> segments;  // ascending file id
  DeltaSnapshot deltas;
};

// Two-pointer merge of the master scan with the delta scan. Both inputs are
// ascending by RecordId, so the reader holds at most one pending entry per
// side. Delete markers drop the row, patches overwrite cells, and the
// predicate sees the merged row before projection.
class UnionReader {
 public:
  UnionReader(const TableSnapshot& snapshot, std::vector<SegmentRef> segments,
              RecordId lo, std::optional<RecordId> hi, Projection projection,
              RowPredicate predicate, IoCounters& counters);

  std::optional<MergedRow> next();

 private:
  std::vector<SegmentRef> keep_alive_;
  TableScanner master_;
  DeltaCursor deltas_;
  Projection projection_;
  RowPredicate predicate_;
};

UnionReader union_read(const TableSnapshot& snapshot, Projection projection,
                       RowPredicate predicate, IoCounters& counters);

// The slice of union_read covering one segment's id window
// [file_id << 32, (file_id + 1) << 32).
UnionReader union_read_partition(const TableSnapshot& snapshot, const SegmentRef& segment,
                                 Projection projection, RowPredicate predicate,
                                 IoCounters& counters);

}  // namespace dualtable

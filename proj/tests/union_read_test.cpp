#include <random>

#include <gtest/gtest.h>

#include "dualtable/union_read.hpp"
#include "temp_dir.hpp"

using namespace dualtable;
using dualtable::testing::TempDir;

namespace {

struct Fixture {
  TempDir dir;
  IoCounters counters;
  Schema schema;
  std::vector<SegmentRef> segments;
  std::unique_ptr<AttachedStore> attached;

  explicit Fixture(Schema s) : schema(std::move(s)) {
    attached = std::make_unique<AttachedStore>(dir / "j.log", schema, counters);
    attached->clear(0);
  }

  void add_segment(std::uint32_t file_id, const std::vector<Row>& rows) {
    segments.push_back(std::make_shared<const SegmentFile>(
        write_segment(dir.path(), 1, file_id, schema, rows, counters)));
  }

  TableSnapshot snapshot() const { return {schema, segments, attached->snapshot()}; }
};

std::vector<MergedRow> drain(UnionReader reader) {
  std::vector<MergedRow> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

}  // namespace

TEST(UnionRead, EmptyAttachedEqualsScan) {
  Fixture f(Schema{{{"a", ColumnType::kInt64}, {"s", ColumnType::kUtf8}}});
  f.add_segment(0, {{std::int64_t{1}, std::string("x")}, {std::int64_t{2}, Value{}}});
  f.add_segment(3, {{std::int64_t{3}, std::string("y")}});
  const auto before = f.counters.snapshot();
  auto merged = drain(union_read(f.snapshot(), std::nullopt, nullptr, f.counters));
  EXPECT_EQ((f.counters.snapshot() - before).attached_entries_read, 0u);
  auto scan = scan_table(f.segments, f.schema, std::nullopt, f.counters);
  std::size_t i = 0;
  while (auto r = scan.next()) {
    ASSERT_LT(i, merged.size());
    EXPECT_EQ(merged[i].record_id, r->record_id);
    EXPECT_EQ(merged[i].row, r->row);
    ++i;
  }
  EXPECT_EQ(i, merged.size());
}

TEST(UnionRead, DeleteAndPatch) {
  Fixture f(Schema{{{"a", ColumnType::kInt64}}});
  f.add_segment(0, {{std::int64_t{1}}, {std::int64_t{2}}});
  f.attached->put_delete_marker(RecordId(0, 0));
  f.attached->put_patch(RecordId(0, 1), {{0, std::int64_t{9}}});
  auto out = drain(union_read(f.snapshot(), std::nullopt, nullptr, f.counters));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (MergedRow{RecordId(0, 1), {std::int64_t{9}}}));
}

TEST(UnionRead, PredicateSeesMergedRowAndProjectionApplies) {
  Fixture f(Schema{{{"a", ColumnType::kInt64}, {"b", ColumnType::kInt64}}});
  f.add_segment(0, {{std::int64_t{1}, std::int64_t{10}}, {std::int64_t{2}, std::int64_t{20}}});
  f.attached->put_patch(RecordId(0, 0), {{0, std::int64_t{5}}});
  RowPredicate pred = [](const Row& r) { return std::get<std::int64_t>(r[0]) == 5; };
  auto out = drain(union_read(f.snapshot(), std::vector<std::size_t>{1}, pred, f.counters));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].row, Row{std::int64_t{10}});
}

TEST(UnionRead, OrphanDeltasAreSkipped) {
  Fixture f(Schema{{{"a", ColumnType::kInt64}}});
  f.add_segment(2, {{std::int64_t{1}}});
  f.attached->put_delete_marker(RecordId(1, 0));
  f.attached->put_delete_marker(RecordId(2, 7));
  auto out = drain(union_read(f.snapshot(), std::nullopt, nullptr, f.counters));
  ASSERT_EQ(out.size(), 1u);
}

TEST(UnionRead, RandomScriptMatchesListOracle) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 20; ++round) {
    Fixture f(Schema{{{"a", ColumnType::kInt64}, {"b", ColumnType::kUtf8}, {"c", ColumnType::kFloat64}}});
    // Reference: (id, row, alive) in id order.
    struct Ref {
      RecordId id;
      Row row;
      bool alive = true;
    };
    std::vector<Ref> ref;
    std::uint32_t file = 0;
    std::size_t total = 0;
    while (total < 1000 && rng() % 4 != 0) {
      std::vector<Row> rows(rng() % 200);
      for (auto& r : rows) {
        r = {static_cast<std::int64_t>(rng() % 1000), std::string(rng() % 5, 'q'),
             static_cast<double>(rng() % 100) / 4};
      }
      for (std::uint32_t i = 0; i < rows.size(); ++i) ref.push_back({RecordId(file, i), rows[i]});
      total += rows.size();
      f.add_segment(file, rows);
      file += 1 + static_cast<std::uint32_t>(rng() % 3);
    }
    if (ref.empty()) continue;
    for (int op = 0; op < 300; ++op) {
      auto& target = ref[rng() % ref.size()];
      if (!target.alive) continue;
      if (rng() % 4 == 0) {
        f.attached->put_delete_marker(target.id);
        target.alive = false;
      } else {
        const auto col = static_cast<std::uint16_t>(rng() % 3);
        Value v;
        if (rng() % 6 != 0) {
          if (col == 0) v = static_cast<std::int64_t>(rng() % 50);
          if (col == 1) v = std::string("p") + std::to_string(rng() % 9);
          if (col == 2) v = 0.5 * static_cast<double>(rng() % 9);
        }
        f.attached->put_patch(target.id, {{col, v}});
        target.row[col] = v;
      }
    }
    std::vector<MergedRow> expect;
    for (const auto& r : ref) {
      if (r.alive) expect.push_back({r.id, r.row});
    }
    ASSERT_EQ(drain(union_read(f.snapshot(), std::nullopt, nullptr, f.counters)), expect);
  }
}

TEST(UnionRead, PartitionsAreDisjointAndExhaustive) {
  std::mt19937_64 rng(4);
  Fixture f(Schema{{{"a", ColumnType::kInt64}}});
  std::uint32_t file = 0;
  for (int s = 0; s < 6; ++s) {
    std::vector<Row> rows(1 + rng() % 50);
    for (auto& r : rows) r = {static_cast<std::int64_t>(rng() % 100)};
    f.add_segment(file, rows);
    for (std::uint32_t i = 0; i < rows.size(); ++i) {
      if (rng() % 5 == 0) f.attached->put_delete_marker(RecordId(file, i));
      else if (rng() % 5 == 0) f.attached->put_patch(RecordId(file, i), {{0, std::int64_t{-1}}});
    }
    file += 1 + static_cast<std::uint32_t>(rng() % 2);
  }
  // Last segment at the top of the id space exercises the unbounded window.
  f.add_segment(0xFFFFFFFF, {{std::int64_t{7}}, {std::int64_t{8}}});
  f.attached->put_delete_marker(RecordId(0xFFFFFFFF, 1));

  const auto snap = f.snapshot();
  auto full = drain(union_read(snap, std::nullopt, nullptr, f.counters));
  std::vector<MergedRow> joined;
  for (const auto& seg : snap.segments) {
    auto part = drain(union_read_partition(snap, seg, std::nullopt, nullptr, f.counters));
    for (const auto& r : part) EXPECT_EQ(r.record_id.file_id(), seg->handle().file_id);
    joined.insert(joined.end(), part.begin(), part.end());
  }
  EXPECT_EQ(joined, full);
}

TEST(UnionRead, PartitionWithoutDeltasReadsNoEntries) {
  Fixture f(Schema{{{"a", ColumnType::kInt64}}});
  f.add_segment(0, {{std::int64_t{1}}});
  f.add_segment(1, {{std::int64_t{2}}});
  f.attached->put_delete_marker(RecordId(1, 0));
  const auto snap = f.snapshot();
  const auto before = f.counters.snapshot();
  auto part = drain(union_read_partition(snap, snap.segments[0], std::nullopt, nullptr, f.counters));
  EXPECT_EQ(part.size(), 1u);
  EXPECT_EQ((f.counters.snapshot() - before).attached_entries_read, 0u);
}

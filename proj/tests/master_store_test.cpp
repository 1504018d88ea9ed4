#include <random>

#include <gtest/gtest.h>

#include "dualtable/error.hpp"
#include "dualtable/master_store.hpp"
#include "temp_dir.hpp"

using namespace dualtable;
using dualtable::testing::TempDir;

namespace {

Schema mixed_schema() {
  return Schema{{{"i", ColumnType::kInt64},
                 {"f", ColumnType::kFloat64},
                 {"s", ColumnType::kUtf8},
                 {"b", ColumnType::kBool}}};
}

Row random_row(std::mt19937_64& rng) {
  auto maybe = [&](Value v) { return rng() % 8 == 0 ? Value{} : v; };
  std::string s(rng() % 20, 'a');
  for (auto& c : s) c = static_cast<char>('a' + rng() % 26);
  return {maybe(static_cast<std::int64_t>(rng())),
          maybe(static_cast<double>(rng() % 100000) / 7.0), maybe(s), maybe(rng() % 2 == 0)};
}

std::vector<ScannedRow> scan_all(SegmentScanner scanner) {
  std::vector<ScannedRow> out;
  while (auto r = scanner.next()) out.push_back(std::move(*r));
  return out;
}

// Independent size oracle: header + per row (bitmap + 4-byte length + payload
// per non-null cell) + trailer.
std::uint64_t expected_size(const std::vector<Row>& rows) {
  std::uint64_t n = 30 + 4;
  for (const auto& row : rows) {
    n += (row.size() + 7) / 8;
    for (const auto& v : row) {
      if (v.index() == 0) continue;
      n += 4;
      if (v.index() == 1 || v.index() == 2) n += 8;
      if (v.index() == 3) n += std::get<std::string>(v).size();
      if (v.index() == 4) n += 1;
    }
  }
  return n;
}

}  // namespace

TEST(MasterStore, EmptySegment) {
  TempDir dir;
  IoCounters counters;
  const auto schema = mixed_schema();
  auto h = write_segment(dir.path(), 1, 0, schema, {}, counters);
  EXPECT_EQ(h.row_count, 0u);
  EXPECT_EQ(h.file_size, 34u);
  EXPECT_TRUE(scan_all(SegmentScanner(h, schema, std::nullopt, counters)).empty());
  EXPECT_EQ(open_segment(h.path, schema).row_count, 0u);
}

TEST(MasterStore, ThreeRowsInOrder) {
  TempDir dir;
  IoCounters counters;
  const auto schema = mixed_schema();
  std::vector<Row> rows = {{std::int64_t{1}, 1.5, std::string("x"), true},
                           {std::int64_t{2}, Value{}, std::string(""), false},
                           {Value{}, -0.25, Value{}, Value{}}};
  auto h = write_segment(dir.path(), 1, 5, schema, rows, counters);
  EXPECT_EQ(h.file_size, expected_size(rows));
  EXPECT_EQ(counters.snapshot().master_written, h.file_size);
  auto out = scan_all(SegmentScanner(h, schema, std::nullopt, counters));
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(out[i].row, rows[i]);
    EXPECT_EQ(out[i].record_id, RecordId(5, static_cast<std::uint32_t>(i)));
  }
  EXPECT_EQ(counters.snapshot().master_read, h.file_size);
}

TEST(MasterStore, RandomRoundTrip) {
  TempDir dir;
  IoCounters counters;
  std::mt19937_64 rng(11);
  const auto schema = mixed_schema();
  std::vector<Row> rows;
  for (int i = 0; i < 100000; ++i) rows.push_back(random_row(rng));
  auto h = write_segment(dir.path(), 2, 3, schema, rows, counters);
  EXPECT_EQ(h.file_size, expected_size(rows));
  SegmentScanner scanner(h, schema, std::nullopt, counters);
  std::uint32_t i = 0;
  while (auto r = scanner.next()) {
    ASSERT_EQ(r->record_id, RecordId(3, i));
    ASSERT_EQ(r->row, rows[i]);
    ++i;
  }
  EXPECT_EQ(i, rows.size());
}

TEST(MasterStore, ProjectionKeepsIds) {
  TempDir dir;
  IoCounters counters;
  Schema wide;
  for (int c = 0; c < 23; ++c) wide.columns.push_back({"c" + std::to_string(c), ColumnType::kInt64});
  std::vector<Row> rows;
  for (std::int64_t r = 0; r < 10; ++r) {
    Row row;
    for (std::int64_t c = 0; c < 23; ++c) row.emplace_back(r * 100 + c);
    rows.push_back(row);
  }
  auto h = write_segment(dir.path(), 1, 0, wide, rows, counters);
  auto out = scan_all(SegmentScanner(h, wide, std::vector<std::size_t>{7}, counters));
  ASSERT_EQ(out.size(), 10u);
  for (std::size_t r = 0; r < 10; ++r) {
    EXPECT_EQ(out[r].row, Row{std::int64_t(r * 100 + 7)});
    EXPECT_EQ(out[r].record_id, RecordId(0, static_cast<std::uint32_t>(r)));
  }
}

TEST(MasterStore, RejectsBadRowsAndLeavesNoFile) {
  TempDir dir;
  IoCounters counters;
  std::vector<Row> rows = {{std::string("wrong"), 1.0, Value{}, Value{}}};
  EXPECT_THROW(write_segment(dir.path(), 1, 0, mixed_schema(), rows, counters), UserError);
  EXPECT_FALSE(std::filesystem::exists(segment_path(dir.path(), 1, 0)));
}

TEST(MasterStore, DetectsCorruption) {
  TempDir dir;
  IoCounters counters;
  const auto schema = mixed_schema();
  std::vector<Row> rows = {{std::int64_t{1}, 1.0, std::string("abc"), true}};
  auto h = write_segment(dir.path(), 1, 0, schema, rows, counters);
  auto bytes = read_file(h.path);
  bytes[40] ^= 0x01;
  write_file(h.path, bytes);
  EXPECT_THROW(scan_all(SegmentScanner(h, schema, std::nullopt, counters)), CorruptionError);
  Schema other{{{"z", ColumnType::kInt64}}};
  auto h2 = write_segment(dir.path(), 1, 1, schema, rows, counters);
  EXPECT_THROW(open_segment(h2.path, other), CorruptionError);
  write_file(h2.path, Bytes{'D', 'T'});
  EXPECT_THROW(open_segment(h2.path, schema), CorruptionError);
}

TEST(MasterStore, TableScanAcrossSegments) {
  TempDir dir;
  IoCounters counters;
  Schema schema{{{"a", ColumnType::kInt64}}};
  auto h0 = write_segment(dir.path(), 1, 0, schema, {{Row{std::int64_t{1}}, Row{std::int64_t{2}}}}, counters);
  auto h1 = write_segment(dir.path(), 1, 1, schema, {{Row{std::int64_t{3}}}}, counters);
  TableScanner scan({h1, h0}, schema, std::nullopt, counters);
  std::vector<std::uint64_t> ids;
  while (auto r = scan.next()) ids.push_back(r->record_id.packed());
  EXPECT_EQ(ids, (std::vector<std::uint64_t>{0x0, 0x1, 0x100000000ULL}));

  TableScanner empty({}, schema, std::nullopt, counters);
  EXPECT_FALSE(empty.next());
}

TEST(MasterStore, RandomMultiSegmentIdsIncrease) {
  TempDir dir;
  IoCounters counters;
  std::mt19937_64 rng(5);
  const auto schema = mixed_schema();
  std::vector<SegmentHandle> handles;
  std::uint64_t total = 0;
  std::uint32_t file = 0;
  for (int s = 0; s < 12; ++s) {
    file += 1 + static_cast<std::uint32_t>(rng() % 5);
    std::vector<Row> rows(rng() % 300);
    for (auto& r : rows) r = random_row(rng);
    total += rows.size();
    handles.push_back(write_segment(dir.path(), 1, file, schema, rows, counters));
  }
  std::shuffle(handles.begin(), handles.end(), rng);
  TableScanner scan(handles, schema, std::nullopt, counters);
  std::optional<RecordId> prev;
  std::uint64_t n = 0;
  while (auto r = scan.next()) {
    if (prev) ASSERT_LT(*prev, r->record_id);
    prev = r->record_id;
    ++n;
  }
  EXPECT_EQ(n, total);
}

TEST(MasterStore, SetWriterCutsAtTarget) {
  TempDir dir;
  IoCounters counters;
  Schema schema{{{"a", ColumnType::kInt64}}};
  std::uint32_t next = 0;
  SegmentSetWriter writer(dir.path(), 1, schema, [&] { return next++; }, counters, nullptr, 1000);
  for (std::int64_t i = 0; i < 1000; ++i) writer.append(Row{i});
  auto handles = writer.finish();
  ASSERT_GT(handles.size(), 1u);
  std::uint64_t rows = 0;
  for (const auto& h : handles) {
    EXPECT_LE(h.file_size, 1000u + 34 + 13);
    rows += h.row_count;
  }
  EXPECT_EQ(rows, 1000u);

  SegmentSetWriter none(dir.path(), 1, schema, [&] { return next++; }, counters);
  EXPECT_TRUE(none.finish().empty());
}

TEST(MasterStore, SetWriterAbortRemovesFiles) {
  TempDir dir;
  IoCounters counters;
  Schema schema{{{"a", ColumnType::kInt64}}};
  std::uint32_t next = 0;
  {
    SegmentSetWriter writer(dir.path(), 1, schema, [&] { return next++; }, counters, nullptr, 100);
    for (std::int64_t i = 0; i < 100; ++i) writer.append(Row{i});
    EXPECT_THROW(writer.append(Row{std::string("x")}), UserError);
  }
  EXPECT_TRUE(std::filesystem::is_empty(dir.path()));
}

TEST(MasterStore, ObsoleteSegmentRemovedWithLastReference) {
  TempDir dir;
  IoCounters counters;
  Schema schema{{{"a", ColumnType::kInt64}}};
  auto h = write_segment(dir.path(), 1, 0, schema, {{Row{std::int64_t{1}}}}, counters);
  auto ref = std::make_shared<const SegmentFile>(h);
  auto reader_copy = ref;
  ref->mark_obsolete();
  ref.reset();
  EXPECT_TRUE(std::filesystem::exists(h.path));
  reader_copy.reset();
  EXPECT_FALSE(std::filesystem::exists(h.path));
}

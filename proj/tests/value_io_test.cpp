#include <gtest/gtest.h>

#include "dualtable/bytes.hpp"
#include "dualtable/error.hpp"
#include "dualtable/io.hpp"
#include "dualtable/value.hpp"
#include "temp_dir.hpp"

using namespace dualtable;
using dualtable::testing::TempDir;

namespace {

Bytes as_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

}  // namespace

TEST(Value, ColumnTypeNames) {
  EXPECT_EQ(parse_column_type("bigint"), ColumnType::kInt64);
  EXPECT_EQ(parse_column_type("DOUBLE"), ColumnType::kFloat64);
  EXPECT_EQ(parse_column_type("varchar"), ColumnType::kUtf8);
  EXPECT_EQ(parse_column_type("boolean"), ColumnType::kBool);
  EXPECT_FALSE(parse_column_type("decimal"));
  for (auto t : {ColumnType::kInt64, ColumnType::kFloat64, ColumnType::kUtf8, ColumnType::kBool}) {
    EXPECT_EQ(parse_column_type(to_string(t)), t);
  }
}

TEST(Value, PayloadSizes) {
  EXPECT_EQ(payload_size(Value{}), 0u);
  EXPECT_EQ(payload_size(Value{std::int64_t{5}}), 8u);
  EXPECT_EQ(payload_size(Value{2.5}), 8u);
  EXPECT_EQ(payload_size(Value{true}), 1u);
  EXPECT_EQ(payload_size(Value{std::string("h\xc3\xa9")}), 3u);
}

TEST(Value, Formatting) {
  EXPECT_EQ(format_value(Value{}), "NULL");
  EXPECT_EQ(format_value(Value{std::int64_t{-3}}), "-3");
  EXPECT_EQ(format_value(Value{2.0}), "2.0");
  EXPECT_EQ(format_value(Value{0.1}), "0.1");
  EXPECT_EQ(format_value(Value{1e300}), "1e+300");
  EXPECT_EQ(format_value(Value{false}), "false");
}

TEST(Schema, ValidateAndCheckRow) {
  Schema s{{{"a", ColumnType::kInt64}, {"b", ColumnType::kUtf8}}};
  EXPECT_NO_THROW(s.validate());
  EXPECT_NO_THROW(s.check_row({std::int64_t{1}, std::monostate{}}));
  EXPECT_THROW(s.check_row({std::int64_t{1}}), UserError);
  EXPECT_THROW(s.check_row({std::string("x"), std::string("y")}), UserError);
  EXPECT_THROW(Schema{}.validate(), UserError);
  Schema dup{{{"a", ColumnType::kInt64}, {"a", ColumnType::kBool}}};
  EXPECT_THROW(dup.validate(), UserError);
  EXPECT_EQ(s.find("b"), 1u);
  EXPECT_FALSE(s.find("c"));
}

TEST(Schema, DigestDependsOnNamesAndTypes) {
  Schema a{{{"a", ColumnType::kInt64}}};
  Schema b{{{"a", ColumnType::kFloat64}}};
  Schema c{{{"b", ColumnType::kInt64}}};
  EXPECT_EQ(a.digest(), Schema{a}.digest());
  EXPECT_NE(a.digest(), b.digest());
  EXPECT_NE(a.digest(), c.digest());
}

TEST(Bytes, BigEndianRoundTrip) {
  Bytes out;
  put_u8(out, 0xAB);
  put_u16(out, 0x1234);
  put_u32(out, 0xDEADBEEF);
  put_u64(out, 0x0102030405060708ULL);
  EXPECT_EQ(out[1], 0x12);
  EXPECT_EQ(out[3], 0xDE);
  ByteReader in(out);
  EXPECT_EQ(in.u8(), 0xAB);
  EXPECT_EQ(in.u16(), 0x1234);
  EXPECT_EQ(in.u32(), 0xDEADBEEFu);
  EXPECT_EQ(in.u64(), 0x0102030405060708ULL);
  EXPECT_TRUE(in.at_end());
  EXPECT_THROW(in.u8(), CorruptionError);
}

TEST(Bytes, Crc32CheckValue) {
  // Standard check value of CRC-32/ISO-HDLC.
  EXPECT_EQ(crc32(as_bytes("123456789")), 0xCBF43926u);
  EXPECT_EQ(crc32(Bytes{}), 0u);
}

TEST(Io, AtomicWriteReplacesContent) {
  TempDir dir;
  const auto path = dir / "f";
  write_file_atomic(path, as_bytes("one"));
  write_file_atomic(path, as_bytes("two"));
  EXPECT_EQ(read_file(path), as_bytes("two"));
  EXPECT_FALSE(std::filesystem::exists(dir / "f.tmp"));
}

TEST(Io, CrashBeforeRenameKeepsOldContent) {
  TempDir dir;
  const auto path = dir / "f";
  write_file_atomic(path, as_bytes("old"));
  for (std::uint64_t step = 0; step < 2; ++step) {
    FaultInjector fault;
    fault.arm(step);
    EXPECT_THROW(write_file_atomic(path, as_bytes("new content"), &fault, "x"), SimulatedCrash);
    EXPECT_EQ(read_file(path), as_bytes("old"));
  }
  FaultInjector counting;
  write_file_atomic(path, as_bytes("new"), &counting, "x");
  EXPECT_EQ(counting.sites(), (std::vector<std::string>{"x.tmp", "x.rename"}));
}

TEST(Io, TornWriteLeavesHalf) {
  TempDir dir;
  FaultInjector fault;
  fault.arm(0);
  EXPECT_THROW(write_file(dir / "g", as_bytes("abcdefgh"), &fault, "w"), SimulatedCrash);
  EXPECT_EQ(read_file(dir / "g"), as_bytes("abcd"));
}

TEST(Io, AppendFileAppendsAndTruncates) {
  TempDir dir;
  AppendFile f(dir / "log");
  f.append(as_bytes("abc"));
  f.append(as_bytes("def"));
  EXPECT_EQ(f.size(), 6u);
  f.truncate(4);
  f.append(as_bytes("Z"));
  EXPECT_EQ(read_file(dir / "log"), as_bytes("abcdZ"));
}

TEST(Io, ReadMissingFileIsIoError) {
  TempDir dir;
  EXPECT_THROW(read_file(dir / "missing"), IoError);
}

TEST(Io, ByteCountsArithmetic) {
  ByteCounts a{10, 20, 30, 40, 5};
  ByteCounts b{1, 2, 3, 4, 1};
  EXPECT_EQ(a - b, (ByteCounts{9, 18, 27, 36, 4}));
  EXPECT_EQ(b + b, (ByteCounts{2, 4, 6, 8, 2}));
}

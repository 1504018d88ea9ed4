#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "dualtable/error.hpp"

namespace dualtable {

// Identity of a master row: the segment's file ID in the high 32 bits and the
// row's position inside that segment in the low 32 bits. Ordering on the
// packed value is lexicographic on (file_id, row_number), so rows of one
// segment are consecutive and ascending.
class RecordId {
 public:
  constexpr RecordId() = default;
  constexpr RecordId(std::uint32_t file_id, std::uint32_t row_number)
      : packed_((static_cast<std::uint64_t>(file_id) << 32) | row_number) {}

  static constexpr RecordId from_packed(std::uint64_t packed) {
    RecordId id;
    id.packed_ = packed;
    return id;
  }

  constexpr std::uint64_t packed() const { return packed_; }
  constexpr std::uint32_t file_id() const { return static_cast<std::uint32_t>(packed_ >> 32); }
  constexpr std::uint32_t row_number() const { return static_cast<std::uint32_t>(packed_); }

  constexpr auto operator<=>(const RecordId&) const = default;

  // First id of the segment with the given file id.
  static constexpr RecordId segment_begin(std::uint32_t file_id) { return RecordId(file_id, 0); }

 private:
  std::uint64_t packed_ = 0;
};

// Checked construction from wider integers.
inline RecordId make_record_id(std::uint64_t file_id, std::uint64_t row_number) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (file_id > kMax) {
    throw UserError("record id: file id " + std::to_string(file_id) + " exceeds 32 bits");
  }
  if (row_number > kMax) {
    throw UserError("record id: row number " + std::to_string(row_number) + " exceeds 32 bits");
  }
  return RecordId(static_cast<std::uint32_t>(file_id), static_cast<std::uint32_t>(row_number));
}

}  // namespace dualtable

template <>
struct std::hash<dualtable::RecordId> {
  std::size_t operator()(const dualtable::RecordId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.packed());
  }
};

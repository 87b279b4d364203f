#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rlfc {

// Bounded Integer Sequence Encoding.
//
// A range of cardinality N is either 2^b (plain bits), 3*2^b (one trit plus
// b low bits per value) or 5*2^b (one quint plus b low bits). Trits are
// packed five to a byte (3^5 = 243 <= 256), quints three to 7 bits
// (5^3 = 125 <= 128).
//
// Layout, LSB-first throughout:
//   BITS : value_0[b] value_1[b] ...
//   TRIT : for each group of up to 5 values: pack[8] low_0[b] .. low_k[b]
//   QUINT: for each group of up to 3 values: pack[7] low_0[b] .. low_k[b]
// pack = sum t_i * 3^i (or q_i * 5^i); absent group members count as 0.
// The final byte is zero padded.

enum class BiseMode : std::uint8_t { Bits, Trit, Quint };

struct RangeDescriptor {
  BiseMode mode = BiseMode::Bits;
  int low_bits = 1;
  int table_index = 0;

  std::uint32_t cardinality() const;
  bool operator==(const RangeDescriptor&) const = default;
};

inline constexpr int kRangeTableSize = 30;
inline constexpr std::uint32_t kMaxBiseValue = 2047;

/// Entry `index` of the canonical range table; throws FormatError when out of table.
RangeDescriptor range_from_index(int index);

/// Smallest table entry whose cardinality exceeds `max_value`.
RangeDescriptor select_range(std::uint32_t max_value);

/// Bit count of an encoded sequence, before byte padding.
std::size_t payload_size(const RangeDescriptor& range, std::size_t count);

inline std::size_t payload_bytes(const RangeDescriptor& range, std::size_t count) {
  return (payload_size(range, count) + 7) / 8;
}

std::vector<std::uint8_t> bise_encode(std::span<const std::uint32_t> values,
                                      const RangeDescriptor& range);

/// Appends the encoding to `out` (byte aligned start and end).
void bise_encode_into(std::span<const std::uint32_t> values, const RangeDescriptor& range,
                      std::vector<std::uint8_t>& out);

/// Decodes `out.size()` values. Throws FormatError on a short buffer or an
/// impossible trit/quint pack.
void bise_decode(std::span<const std::uint8_t> bytes, const RangeDescriptor& range,
                 std::span<std::uint32_t> out);

std::vector<std::uint32_t> bise_decode(std::span<const std::uint8_t> bytes, std::size_t count,
                                       const RangeDescriptor& range);

constexpr std::uint32_t zigzag(std::int32_t v) {
  return v >= 0 ? static_cast<std::uint32_t>(v) << 1 : (static_cast<std::uint32_t>(-v) << 1) - 1;
}

constexpr std::int32_t unzigzag(std::uint32_t z) {
  return (z & 1u) ? -static_cast<std::int32_t>((z + 1) >> 1) : static_cast<std::int32_t>(z >> 1);
}

}  // namespace rlfc

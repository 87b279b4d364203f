#include "rlfc/bise.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "rlfc/errors.hpp"

namespace rlfc {
namespace {

constexpr std::array<RangeDescriptor, kRangeTableSize> make_range_table() {
  // N = 2,3,4,5,6,8,10,12,16,...,1536,2048
  std::array<RangeDescriptor, kRangeTableSize> table{};
  int i = 0;
  table[i++] = {BiseMode::Bits, 1, 0};
  table[i++] = {BiseMode::Trit, 0, 0};
  table[i++] = {BiseMode::Bits, 2, 0};
  table[i++] = {BiseMode::Quint, 0, 0};
  for (int b = 1; i < kRangeTableSize; ++b) {
    table[i++] = {BiseMode::Trit, b, 0};
    table[i++] = {BiseMode::Bits, b + 2, 0};
    if (i < kRangeTableSize) table[i++] = {BiseMode::Quint, b, 0};
  }
  for (int k = 0; k < kRangeTableSize; ++k) table[k].table_index = k;
  return table;
}

constexpr auto kRangeTable = make_range_table();

constexpr std::uint32_t cardinality_of(const RangeDescriptor& r) {
  const std::uint32_t base = r.mode == BiseMode::Bits ? 1u : (r.mode == BiseMode::Trit ? 3u : 5u);
  return base << r.low_bits;
}

struct TritTable {
  std::array<std::array<std::uint8_t, 5>, 243> digits{};
};

struct QuintTable {
  std::array<std::array<std::uint8_t, 3>, 125> digits{};
};

constexpr TritTable make_trit_table() {
  TritTable t{};
  for (int p = 0; p < 243; ++p) {
    int v = p;
    for (int i = 0; i < 5; ++i) {
      t.digits[p][i] = static_cast<std::uint8_t>(v % 3);
      v /= 3;
    }
  }
  return t;
}

constexpr QuintTable make_quint_table() {
  QuintTable t{};
  for (int p = 0; p < 125; ++p) {
    int v = p;
    for (int i = 0; i < 3; ++i) {
      t.digits[p][i] = static_cast<std::uint8_t>(v % 5);
      v /= 5;
    }
  }
  return t;
}

constexpr auto kTritTable = make_trit_table();
constexpr auto kQuintTable = make_quint_table();

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(std::uint32_t value, int bits) {
    for (int i = 0; i < bits; ++i) {
      if (fill_ == 0) out_.push_back(0);
      out_.back() |= static_cast<std::uint8_t>(((value >> i) & 1u) << fill_);
      fill_ = (fill_ + 1) & 7;
    }
  }

 private:
  std::vector<std::uint8_t>& out_;
  int fill_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t get(int bits) {
    std::uint32_t v = 0;
    for (int i = 0; i < bits; ++i, ++pos_) {
      v |= static_cast<std::uint32_t>((bytes_[pos_ >> 3] >> (pos_ & 7)) & 1u) << i;
    }
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t RangeDescriptor::cardinality() const { return cardinality_of(*this); }

RangeDescriptor range_from_index(int index) {
  if (index < 0 || index >= kRangeTableSize) {
    throw FormatError("BISE range descriptor " + std::to_string(index) + " is outside the range table");
  }
  return kRangeTable[index];
}

RangeDescriptor select_range(std::uint32_t max_value) {
  for (const auto& r : kRangeTable) {
    if (cardinality_of(r) > max_value) return r;
  }
  throw Error("value " + std::to_string(max_value) + " exceeds the largest BISE range");
}

std::size_t payload_size(const RangeDescriptor& range, std::size_t count) {
  const auto b = static_cast<std::size_t>(range.low_bits);
  switch (range.mode) {
    case BiseMode::Bits:
      return count * b;
    case BiseMode::Trit:
      return 8 * ((count + 4) / 5) + count * b;
    case BiseMode::Quint:
      return 7 * ((count + 2) / 3) + count * b;
  }
  return 0;
}

void bise_encode_into(std::span<const std::uint32_t> values, const RangeDescriptor& range,
                      std::vector<std::uint8_t>& out) {
  const std::uint32_t n = range.cardinality();
  for (auto v : values) {
    if (v >= n) {
      throw Error("BISE value " + std::to_string(v) + " does not fit range " + std::to_string(n));
    }
  }
  BitWriter w(out);
  const int b = range.low_bits;
  const std::uint32_t low_mask = (1u << b) - 1u;
  if (range.mode == BiseMode::Bits) {
    for (auto v : values) w.put(v, b);
    return;
  }
  const bool trit = range.mode == BiseMode::Trit;
  const std::size_t group = trit ? 5 : 3;
  const std::uint32_t radix = trit ? 3 : 5;
  const int pack_bits = trit ? 8 : 7;
  for (std::size_t start = 0; start < values.size(); start += group) {
    const std::size_t end = std::min(values.size(), start + group);
    std::uint32_t pack = 0;
    for (std::size_t i = end; i-- > start;) pack = pack * radix + (values[i] >> b);
    w.put(pack, pack_bits);
    for (std::size_t i = start; i < end; ++i) w.put(values[i] & low_mask, b);
  }
}

std::vector<std::uint8_t> bise_encode(std::span<const std::uint32_t> values,
                                      const RangeDescriptor& range) {
  std::vector<std::uint8_t> out;
  out.reserve(payload_bytes(range, values.size()));
  bise_encode_into(values, range, out);
  return out;
}

void bise_decode(std::span<const std::uint8_t> bytes, const RangeDescriptor& range,
                 std::span<std::uint32_t> out) {
  const std::size_t need = payload_bytes(range, out.size());
  if (bytes.size() < need) {
    throw FormatError("BISE payload truncated: need " + std::to_string(need) + " bytes, have " +
                      std::to_string(bytes.size()));
  }
  BitReader r(bytes);
  const int b = range.low_bits;
  if (range.mode == BiseMode::Bits) {
    for (auto& v : out) v = r.get(b);
    return;
  }
  const bool trit = range.mode == BiseMode::Trit;
  const std::size_t group = trit ? 5 : 3;
  for (std::size_t start = 0; start < out.size(); start += group) {
    const std::size_t end = std::min(out.size(), start + group);
    const std::uint32_t pack = r.get(trit ? 8 : 7);
    if (trit && pack > 242) throw FormatError("corrupt BISE trit pack " + std::to_string(pack));
    if (!trit && pack > 124) throw FormatError("corrupt BISE quint pack " + std::to_string(pack));
    for (std::size_t i = start; i < end; ++i) {
      const std::uint32_t high = trit ? kTritTable.digits[pack][i - start] : kQuintTable.digits[pack][i - start];
      out[i] = (high << b) | r.get(b);
    }
  }
}

std::vector<std::uint32_t> bise_decode(std::span<const std::uint8_t> bytes, std::size_t count,
                                       const RangeDescriptor& range) {
  std::vector<std::uint32_t> out(count);
  bise_decode(bytes, range, out);
  return out;
}

}  // namespace rlfc

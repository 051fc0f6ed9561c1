#pragma once

// The stored structure: three packed bit tables plus bit-exact serialization.
//
// File format (all integers little-endian):
//   offset 0   magic bytes 'B' 'P' '5' '\0'
//   offset 4   version, u16 (currently 1)
//   offset 6   m, x, z, t, n as u64 each
//   offset 46  bit payload, ceil((|T|+|T0|+|T1|)/8) bytes; the bit stream is
//              T then T0 then T1, bit j stored in byte j/8 at position j%8;
//              trailing bits of the last byte are zero
//   then       stored-set count as u64, followed by that many u64 element
//              indices, strictly increasing (metadata; queries ignore it)

#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "bp5/bitarray.hpp"
#include "bp5/errors.hpp"
#include "bp5/layout.hpp"

namespace bp5 {

inline constexpr char kMagic[4] = {'B', 'P', '5', '\0'};
inline constexpr std::uint16_t kFormatVersion = 1;

struct DataStructure {
  SchemeParams params;
  BitArray table_t;
  BitArray table_t0;
  BitArray table_t1;
  std::vector<Element> stored_set;  // metadata only; never consulted by queries

  bool operator==(const DataStructure&) const = default;
};

inline DataStructure new_empty(const SchemeParams& p) {
  const TableSizes s = table_sizes(p);
  DataStructure ds;
  ds.params = p;
  ds.table_t = BitArray(s.t_bits);
  ds.table_t0 = BitArray(s.t0_bits);
  ds.table_t1 = BitArray(s.t1_bits);
  return ds;
}

inline std::uint64_t space_used(const DataStructure& ds) {
  return ds.table_t.size() + ds.table_t0.size() + ds.table_t1.size();
}

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_]) |
                      static_cast<std::uint16_t>(bytes_[pos_ + 1]) << 8;
    pos_ += 2;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

  std::span<const std::uint8_t> raw(std::size_t len) {
    need(len);
    auto s = bytes_.subspan(pos_, len);
    pos_ += len;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t len) const {
    if (bytes_.size() - pos_ < len) throw FormatError("truncated stream");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const DataStructure& ds) {
  const SchemeParams& p = ds.params;
  std::vector<std::uint8_t> out;
  const std::uint64_t total_bits = space_used(ds);
  out.reserve(46 + (total_bits + 7) / 8 + 8 + 8 * ds.stored_set.size());

  out.insert(out.end(), kMagic, kMagic + 4);
  detail::put_u16(out, kFormatVersion);
  for (std::uint64_t v : {p.m, p.x, p.z, p.t, p.n}) detail::put_u64(out, v);

  std::vector<std::uint8_t> payload((total_bits + 7) / 8, 0);
  std::uint64_t bit = 0;
  for (const BitArray* table : {&ds.table_t, &ds.table_t0, &ds.table_t1}) {
    for (std::uint64_t i = 0; i < table->size(); ++i, ++bit) {
      if (table->get(i)) payload[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
    }
  }
  out.insert(out.end(), payload.begin(), payload.end());

  detail::put_u64(out, ds.stored_set.size());
  for (Element e : ds.stored_set) detail::put_u64(out, e);
  return out;
}

inline DataStructure deserialize(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);

  const auto magic = in.raw(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("bad magic");
  if (in.u16() != kFormatVersion) throw FormatError("unsupported version");

  SchemeParams p;
  p.m = in.u64();
  p.x = in.u64();
  p.z = in.u64();
  p.t = in.u64();
  p.n = in.u64();
  if (p.m < 1 || p.x < 1 || p.z < 1 || p.t < 1) throw FormatError("bad parameter field");
  const SchemeParams derived =
      derive_params(p.m, ParamOverrides{p.x, p.z, p.t});
  if (derived.n != p.n) throw FormatError("inconsistent superblock count");
  p = derived;

  DataStructure ds = new_empty(p);
  const std::uint64_t total_bits = space_used(ds);
  const auto payload = in.raw((total_bits + 7) / 8);
  std::uint64_t bit = 0;
  for (BitArray* table : {&ds.table_t, &ds.table_t0, &ds.table_t1}) {
    for (std::uint64_t i = 0; i < table->size(); ++i, ++bit) {
      if ((payload[bit >> 3] >> (bit & 7)) & 1u) table->set(i, true);
    }
  }
  if ((total_bits & 7) != 0) {
    const std::uint8_t tail = payload[payload.size() - 1];
    if ((tail >> (total_bits & 7)) != 0) throw FormatError("nonzero trailing bits");
  }

  const std::uint64_t count = in.u64();
  if (count > 5) throw FormatError("stored set larger than five");
  ds.stored_set.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    ds.stored_set[i] = in.u64();
    if (ds.stored_set[i] >= p.m) throw FormatError("stored element out of range");
    if (i > 0 && ds.stored_set[i] <= ds.stored_set[i - 1]) {
      throw FormatError("stored set not strictly increasing");
    }
  }
  if (in.remaining() != 0) throw FormatError("trailing bytes");
  return ds;
}

inline void save_file(const DataStructure& ds, const std::string& path) {
  const auto bytes = serialize(ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path);
}

inline DataStructure load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace bp5

#pragma once

// Geometry and addressing for the two-probe membership scheme.
//
// The universe is split into n superblocks of x^2*z*t elements each.  A
// superblock is an x-by-x array of grids, each grid z columns wide and t rows
// tall; every grid point is one element.  Inside superblock i (1-based),
// lines of slope 1/i partition each grid into blocks: the block key of the
// point (col a, row b) is k = a - i*b.  Dotted lines are the same slope-1/i
// lines drawn across the whole superblock in global coordinates
// (A = gx*z + a, B = gy*t + b), with key K = A - i*B; every block lies
// completely on exactly one dotted line.
//
// Bit addressing: table T holds one bit per block, table T0 holds a t-bit
// slot per dotted line (indexed by the local row b), and table T1 holds one
// superblock's worth of bits shared by all superblocks (indexed by the
// within-superblock offset r).

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace bp5 {

using Element = std::uint64_t;

struct ParamOverrides {
  std::optional<std::uint64_t> x;
  std::optional<std::uint64_t> z;
  std::optional<std::uint64_t> t;
};

struct SchemeParams {
  std::uint64_t m = 1;  // universe size (element count)
  std::uint64_t x = 1;  // grid-array side; x*x grids per superblock
  std::uint64_t z = 1;  // grid width, columns
  std::uint64_t t = 1;  // grid height, rows
  std::uint64_t n = 1;  // superblock count, ceil(m / (x^2*z*t))
  std::uint64_t superblock_size = 1;  // x^2*z*t

  // Elements in [m, padded_universe()) are padding: addressable by the
  // geometry but rejected at the query/store boundary.
  std::uint64_t padded_universe() const { return n * superblock_size; }

  bool operator==(const SchemeParams&) const = default;
};

// Defaults x = t = round(m^{1/6}), z = round(m^{1/3}), everything clamped to
// at least 1. Explicit overrides win field by field.
inline SchemeParams derive_params(std::uint64_t m, const ParamOverrides& ov = {}) {
  if (m < 1) m = 1;
  const double zr = std::cbrt(static_cast<double>(m));
  const double xr = std::sqrt(zr);
  auto rounded = [](double v) {
    const auto r = static_cast<std::int64_t>(std::llround(v));
    return static_cast<std::uint64_t>(r < 1 ? 1 : r);
  };
  auto clamp1 = [](std::uint64_t v) { return v < 1 ? std::uint64_t{1} : v; };

  SchemeParams p;
  p.m = m;
  p.x = ov.x ? clamp1(*ov.x) : rounded(xr);
  p.z = ov.z ? clamp1(*ov.z) : rounded(zr);
  p.t = ov.t ? clamp1(*ov.t) : rounded(xr);

  const unsigned __int128 sbs =
      static_cast<unsigned __int128>(p.x) * p.x * p.z * p.t;
  if (sbs > (static_cast<unsigned __int128>(1) << 62)) {
    throw std::invalid_argument("derive_params: superblock size too large");
  }
  p.superblock_size = static_cast<std::uint64_t>(sbs);
  p.n = (m + p.superblock_size - 1) / p.superblock_size;
  return p;
}

struct ElementCoords {
  std::uint64_t superblock = 1;  // i in [1, n]
  std::uint64_t grid = 0;        // g in [0, x^2)
  std::uint64_t grid_x = 0;      // gx = g % x
  std::uint64_t grid_y = 0;      // gy = g / x
  std::uint64_t col = 0;         // a in [0, z)
  std::uint64_t row = 0;         // b in [0, t)
  std::uint64_t super_offset = 0;  // r = g*z*t + b*z + a

  bool operator==(const ElementCoords&) const = default;
};

struct BlockId {
  std::uint64_t superblock = 1;  // i
  std::uint64_t grid = 0;        // g
  std::int64_t key = 0;          // k = a - i*b in [-i*(t-1), z-1]

  auto operator<=>(const BlockId&) const = default;
};

struct DottedLineId {
  std::uint64_t superblock = 1;  // i
  std::int64_t key = 0;          // K = gx*z - i*gy*t + k in [-i*(x*t-1), x*z-1]

  auto operator<=>(const DottedLineId&) const = default;
};

struct TableSizes {
  std::uint64_t t_bits = 0;
  std::uint64_t t0_bits = 0;
  std::uint64_t t1_bits = 0;

  std::uint64_t total() const { return t_bits + t0_bits + t1_bits; }
  bool operator==(const TableSizes&) const = default;
};

struct BitAddresses {
  std::uint64_t t_bit = 0;
  std::uint64_t t0_bit = 0;
  std::uint64_t t1_bit = 0;

  bool operator==(const BitAddresses&) const = default;
};

inline ElementCoords locate(const SchemeParams& p, Element e) {
  if (e >= p.padded_universe()) {
    throw std::out_of_range("locate: element beyond padded universe");
  }
  ElementCoords c;
  c.superblock = 1 + e / p.superblock_size;
  c.super_offset = e % p.superblock_size;
  const std::uint64_t zt = p.z * p.t;
  c.grid = c.super_offset / zt;
  const std::uint64_t in_grid = c.super_offset % zt;
  c.row = in_grid / p.z;
  c.col = in_grid % p.z;
  c.grid_x = c.grid % p.x;
  c.grid_y = c.grid / p.x;
  return c;
}

// Inverse of locate on each superblock.
inline Element element_at(const SchemeParams& p, std::uint64_t superblock,
                          std::uint64_t grid, std::uint64_t col, std::uint64_t row) {
  return (superblock - 1) * p.superblock_size + grid * p.z * p.t + row * p.z + col;
}

inline BlockId block_of_coords(const ElementCoords& c) {
  const auto i = static_cast<std::int64_t>(c.superblock);
  return BlockId{c.superblock, c.grid,
                 static_cast<std::int64_t>(c.col) - i * static_cast<std::int64_t>(c.row)};
}

inline BlockId block_of(const SchemeParams& p, Element e) {
  return block_of_coords(locate(p, e));
}

inline DottedLineId dotted_line_of(const SchemeParams& p, const BlockId& blk) {
  const auto i = static_cast<std::int64_t>(blk.superblock);
  const auto gx = static_cast<std::int64_t>(blk.grid % p.x);
  const auto gy = static_cast<std::int64_t>(blk.grid / p.x);
  return DottedLineId{blk.superblock,
                      gx * static_cast<std::int64_t>(p.z) -
                          i * gy * static_cast<std::int64_t>(p.t) + blk.key};
}

// Addressable block keys per grid of superblock i: k in [-i*(t-1), z-1].
inline std::uint64_t blocks_per_grid(const SchemeParams& p, std::uint64_t i) {
  return p.z + i * (p.t - 1);
}

// Addressable dotted-line keys of superblock i: K in [-i*(x*t-1), x*z-1].
inline std::uint64_t lines_per_superblock(const SchemeParams& p, std::uint64_t i) {
  return p.x * p.z + i * (p.x * p.t - 1);
}

inline std::int64_t min_block_key(const SchemeParams& p, std::uint64_t i) {
  return -static_cast<std::int64_t>(i * (p.t - 1));
}

inline std::int64_t min_line_key(const SchemeParams& p, std::uint64_t i) {
  return -static_cast<std::int64_t>(i * (p.x * p.t - 1));
}

// Bits in T used by superblocks before i.
inline std::uint64_t block_base(const SchemeParams& p, std::uint64_t i) {
  return p.x * p.x * ((i - 1) * p.z + (p.t - 1) * (i - 1) * i / 2);
}

// Dotted lines of superblocks before i.
inline std::uint64_t line_base(const SchemeParams& p, std::uint64_t i) {
  return (i - 1) * p.x * p.z + (p.x * p.t - 1) * (i - 1) * i / 2;
}

inline TableSizes table_sizes(const SchemeParams& p) {
  const std::uint64_t tri = p.n * (p.n + 1) / 2;  // sum of i over superblocks
  TableSizes s;
  s.t_bits = p.x * p.x * (p.n * p.z + (p.t - 1) * tri);
  s.t0_bits = p.t * (p.n * p.x * p.z + (p.x * p.t - 1) * tri);
  s.t1_bits = p.superblock_size;
  return s;
}

// Dense index of a block in table T; injective over all blocks.
inline std::uint64_t t_bit_of_block(const SchemeParams& p, const BlockId& blk) {
  const std::uint64_t local =
      static_cast<std::uint64_t>(blk.key - min_block_key(p, blk.superblock));
  return block_base(p, blk.superblock) + blk.grid * blocks_per_grid(p, blk.superblock) + local;
}

// First bit of a dotted line's t-bit slot in T0.
inline std::uint64_t t0_slot_base(const SchemeParams& p, const DottedLineId& line) {
  const std::uint64_t local =
      static_cast<std::uint64_t>(line.key - min_line_key(p, line.superblock));
  return (line_base(p, line.superblock) + local) * p.t;
}

inline BitAddresses addresses(const SchemeParams& p, Element e) {
  const ElementCoords c = locate(p, e);
  const BlockId blk = block_of_coords(c);
  BitAddresses a;
  a.t_bit = t_bit_of_block(p, blk);
  a.t0_bit = t0_slot_base(p, dotted_line_of(p, blk)) + c.row;
  a.t1_bit = c.super_offset;
  return a;
}

// Elements of a block, ascending by row. A block holds at most one element
// per row; keys near the grid border (or any key when z < i) may hold fewer
// than t elements, possibly none.
inline std::vector<Element> block_elements(const SchemeParams& p, const BlockId& blk) {
  std::vector<Element> out;
  const auto i = static_cast<std::int64_t>(blk.superblock);
  for (std::uint64_t b = 0; b < p.t; ++b) {
    const std::int64_t a = blk.key + i * static_cast<std::int64_t>(b);
    if (a >= 0 && a < static_cast<std::int64_t>(p.z)) {
      out.push_back(element_at(p, blk.superblock, blk.grid,
                               static_cast<std::uint64_t>(a), b));
    }
  }
  return out;
}

// Blocks lying (completely) on a dotted line: at most one per grid.
inline std::vector<BlockId> line_blocks(const SchemeParams& p, const DottedLineId& line) {
  std::vector<BlockId> out;
  const auto i = static_cast<std::int64_t>(line.superblock);
  const auto lo = min_block_key(p, line.superblock);
  const auto hi = static_cast<std::int64_t>(p.z) - 1;
  for (std::uint64_t g = 0; g < p.x * p.x; ++g) {
    const auto gx = static_cast<std::int64_t>(g % p.x);
    const auto gy = static_cast<std::int64_t>(g / p.x);
    const std::int64_t k = line.key - gx * static_cast<std::int64_t>(p.z) +
                           i * gy * static_cast<std::int64_t>(p.t);
    if (k >= lo && k <= hi) out.push_back(BlockId{line.superblock, g, k});
  }
  return out;
}

// Elements sharing element e's T1 bit: same offset r in every other
// superblock. Returned over the padded universe; callers filter to real
// elements.
inline std::vector<Element> t1_bit_sharers(const SchemeParams& p, Element e) {
  const ElementCoords c = locate(p, e);
  std::vector<Element> out;
  out.reserve(p.n - 1);
  for (std::uint64_t j = 1; j <= p.n; ++j) {
    if (j == c.superblock) continue;
    out.push_back((j - 1) * p.superblock_size + c.super_offset);
  }
  return out;
}

// Elements sharing element e's T0 bit: same superblock, same dotted line,
// same local row, in a different grid's block on that line.
inline std::vector<Element> t0_bit_sharers(const SchemeParams& p, Element e) {
  const ElementCoords c = locate(p, e);
  const DottedLineId line = dotted_line_of(p, block_of_coords(c));
  std::vector<Element> out;
  const auto i = static_cast<std::int64_t>(c.superblock);
  for (const BlockId& blk : line_blocks(p, line)) {
    if (blk.grid == c.grid) continue;
    const std::int64_t a = blk.key + i * static_cast<std::int64_t>(c.row);
    if (a >= 0 && a < static_cast<std::int64_t>(p.z)) {
      out.push_back(element_at(p, c.superblock, blk.grid,
                               static_cast<std::uint64_t>(a), c.row));
    }
  }
  return out;
}

}  // namespace bp5

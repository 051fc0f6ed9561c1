#include "bp5/layout.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oracles.hpp"

using namespace bp5;

namespace {

const SchemeParams kSmall = derive_params(64, ParamOverrides{2, 4, 2});

TEST(DeriveParams, OverridesGiveTwoSuperblocks) {
  EXPECT_EQ(kSmall.n, 2u);
  EXPECT_EQ(kSmall.superblock_size, 32u);
  EXPECT_EQ(kSmall.padded_universe(), 64u);
}

TEST(DeriveParams, DegenerateMinimum) {
  const SchemeParams p = derive_params(1);
  EXPECT_EQ(p.x, 1u);
  EXPECT_EQ(p.z, 1u);
  EXPECT_EQ(p.t, 1u);
  EXPECT_EQ(p.n, 1u);
}

TEST(DeriveParams, SixthPowerDefaults) {
  const SchemeParams p = derive_params(std::uint64_t{1} << 30);
  EXPECT_EQ(p.x, 32u);
  EXPECT_EQ(p.t, 32u);
  EXPECT_EQ(p.z, 1024u);
  EXPECT_EQ(p.n, 32u);

  const SchemeParams q = derive_params(64);
  EXPECT_EQ(q.x, 2u);
  EXPECT_EQ(q.z, 4u);
  EXPECT_EQ(q.t, 2u);
}

TEST(DeriveParams, PartialOverrideKeepsOtherDefaults) {
  const SchemeParams p = derive_params(64, ParamOverrides{.z = 8});
  EXPECT_EQ(p.x, 2u);
  EXPECT_EQ(p.z, 8u);
  EXPECT_EQ(p.t, 2u);
}

TEST(Locate, ZeroElement) {
  const ElementCoords c = locate(kSmall, 0);
  EXPECT_EQ(c.superblock, 1u);
  EXPECT_EQ(c.grid, 0u);
  EXPECT_EQ(c.col, 0u);
  EXPECT_EQ(c.row, 0u);
  EXPECT_EQ(c.super_offset, 0u);
}

TEST(Locate, HandEvaluated37) {
  const ElementCoords c = locate(kSmall, 37);
  EXPECT_EQ(c.superblock, 2u);
  EXPECT_EQ(c.super_offset, 5u);
  EXPECT_EQ(c.grid, 0u);
  EXPECT_EQ(c.row, 1u);
  EXPECT_EQ(c.col, 1u);
}

TEST(Locate, BijectionRoundTrip) {
  for (const auto& p : {kSmall, derive_params(10, ParamOverrides{1, 2, 1}),
                        oracles::make_params(3, 2, 3, 4)}) {
    for (Element e = 0; e < p.padded_universe(); ++e) {
      const ElementCoords c = locate(p, e);
      EXPECT_EQ(element_at(p, c.superblock, c.grid, c.col, c.row), e);
      EXPECT_EQ(c.super_offset, c.grid * p.z * p.t + c.row * p.z + c.col);
      EXPECT_EQ(c.grid_x, c.grid % p.x);
      EXPECT_EQ(c.grid_y, c.grid / p.x);
    }
  }
}

TEST(Locate, OutOfRangeThrows) {
  EXPECT_THROW(locate(kSmall, 64), std::out_of_range);
}

TEST(BlockOf, OriginHasKeyZero) {
  EXPECT_EQ(block_of(kSmall, 0).key, 0);
  EXPECT_EQ(block_of(derive_params(1), 0).key, 0);
}

TEST(BlockOf, HandEvaluated37) {
  const BlockId blk = block_of(kSmall, 37);
  EXPECT_EQ(blk.superblock, 2u);
  EXPECT_EQ(blk.grid, 0u);
  EXPECT_EQ(blk.key, -1);
}

TEST(BlockOf, DistinctKeysOfFirstSuperblockGrid) {
  // 4x2 grid, slope 1: all eight points, keys {-1,0,1,2,3}.
  std::set<std::int64_t> keys;
  for (Element e = 0; e < 8; ++e) keys.insert(block_of(kSmall, e).key);
  EXPECT_EQ(keys, (std::set<std::int64_t>{-1, 0, 1, 2, 3}));
  EXPECT_EQ(keys.size(), blocks_per_grid(kSmall, 1));
}

TEST(DottedLine, OriginGrid) {
  EXPECT_EQ(dotted_line_of(kSmall, BlockId{1, 0, 0}).key, 0);
}

TEST(DottedLine, HandEvaluated) {
  // grid 1 of superblock 2: gx=1, gy=0, k=-1 -> K = 4 - 0 - 1 = 3.
  EXPECT_EQ(dotted_line_of(kSmall, BlockId{2, 1, -1}).key, 3);
}

TEST(DottedLine, ConstantPerBlockAndNesting) {
  for (const auto& p : oracles::small_param_pool()) {
    for (std::uint64_t i = 1; i <= p.n; ++i) {
      for (std::uint64_t g = 0; g < p.x * p.x; ++g) {
        for (std::int64_t k = min_block_key(p, i);
             k < static_cast<std::int64_t>(p.z); ++k) {
          const BlockId blk{i, g, k};
          const DottedLineId line = dotted_line_of(p, blk);
          for (Element e : block_elements(p, blk)) {
            EXPECT_EQ(dotted_line_of(p, block_of(p, e)), line);
          }
          // The block is on its own line, and no other block of this grid is.
          int on_line_from_grid = 0;
          for (const BlockId& other : line_blocks(p, line)) {
            if (other.grid == g) {
              ++on_line_from_grid;
              EXPECT_EQ(other, blk);
            }
          }
          EXPECT_EQ(on_line_from_grid, 1);
        }
      }
    }
  }
}

TEST(TableSizes, SmallExample) {
  const TableSizes s = table_sizes(kSmall);
  EXPECT_EQ(s.t1_bits, 32u);
  EXPECT_EQ(s.t_bits, 44u);   // 4*5 + 4*6
  EXPECT_EQ(s.t0_bits, 50u);  // 2*(11 + 14)
}

TEST(TableSizes, SingleElement) {
  const TableSizes s = table_sizes(derive_params(1));
  EXPECT_EQ(s.t_bits, 1u);
  EXPECT_EQ(s.t0_bits, 1u);
  EXPECT_EQ(s.t1_bits, 1u);
}

TEST(TableSizes, ClosedFormMatchesEnumeration) {
  for (const auto& p : oracles::small_param_pool()) {
    std::uint64_t blocks = 0, lines = 0;
    for (std::uint64_t i = 1; i <= p.n; ++i) {
      blocks += p.x * p.x * blocks_per_grid(p, i);
      lines += lines_per_superblock(p, i);
    }
    const TableSizes s = table_sizes(p);
    EXPECT_EQ(s.t_bits, blocks);
    EXPECT_EQ(s.t0_bits, lines * p.t);
    EXPECT_EQ(s.t1_bits, p.superblock_size);
  }
}

TEST(Addresses, ZeroElementExample) {
  const BitAddresses a = addresses(kSmall, 0);
  EXPECT_EQ(a.t_bit, 1u);
  EXPECT_EQ(a.t0_bit, 6u);
  EXPECT_EQ(a.t1_bit, 0u);
}

TEST(Addresses, T1Superimposition) {
  for (Element e = 0; e < kSmall.superblock_size; ++e) {
    EXPECT_EQ(addresses(kSmall, e).t1_bit,
              addresses(kSmall, e + kSmall.superblock_size).t1_bit);
  }
}

TEST(Addresses, FullBlockHitsDistinctT0Offsets) {
  const BlockId blk{1, 0, 0};
  const auto elems = block_elements(kSmall, blk);
  ASSERT_EQ(elems.size(), kSmall.t);
  std::set<std::uint64_t> offsets;
  for (Element e : elems) offsets.insert(addresses(kSmall, e).t0_bit);
  EXPECT_EQ(offsets.size(), kSmall.t);
}

TEST(Addresses, TBitIsDenseOverBlocks) {
  for (const auto& p : oracles::small_param_pool()) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 1; i <= p.n; ++i) {
      for (std::uint64_t g = 0; g < p.x * p.x; ++g) {
        for (std::int64_t k = min_block_key(p, i);
             k < static_cast<std::int64_t>(p.z); ++k) {
          seen.insert(t_bit_of_block(p, BlockId{i, g, k}));
        }
      }
    }
    const TableSizes s = table_sizes(p);
    ASSERT_EQ(seen.size(), s.t_bits);
    EXPECT_EQ(*seen.begin(), 0u);
    EXPECT_EQ(*seen.rbegin(), s.t_bits - 1);
  }
}

TEST(Addresses, SharingStructure) {
  for (const auto& p : oracles::small_param_pool()) {
    const TableSizes s = table_sizes(p);
    std::map<std::uint64_t, std::vector<Element>> by_t0, by_t1;
    for (Element e = 0; e < p.padded_universe(); ++e) {
      const BitAddresses a = addresses(p, e);
      ASSERT_LT(a.t_bit, s.t_bits);
      ASSERT_LT(a.t0_bit, s.t0_bits);
      ASSERT_LT(a.t1_bit, s.t1_bits);
      by_t0[a.t0_bit].push_back(e);
      by_t1[a.t1_bit].push_back(e);
    }
    // T0 bits are shared exactly by same-(superblock, line, row) elements.
    for (const auto& [bit, elems] : by_t0) {
      const ElementCoords first = locate(p, elems.front());
      const DottedLineId line = dotted_line_of(p, block_of_coords(first));
      for (Element e : elems) {
        const ElementCoords c = locate(p, e);
        EXPECT_EQ(c.superblock, first.superblock);
        EXPECT_EQ(c.row, first.row);
        EXPECT_EQ(dotted_line_of(p, block_of_coords(c)), line);
      }
    }
    // T1 bits are shared exactly by same-offset elements across superblocks.
    for (const auto& [bit, elems] : by_t1) {
      EXPECT_EQ(elems.size(), p.n);
      std::set<std::uint64_t> supers;
      for (Element e : elems) {
        const ElementCoords c = locate(p, e);
        EXPECT_EQ(c.super_offset, bit);
        supers.insert(c.superblock);
      }
      EXPECT_EQ(supers.size(), elems.size());
    }
  }
}

TEST(Partition, BlocksPartitionUniverse) {
  for (const auto& p : oracles::small_param_pool()) {
    std::vector<Element> covered;
    for (std::uint64_t i = 1; i <= p.n; ++i) {
      for (std::uint64_t g = 0; g < p.x * p.x; ++g) {
        for (std::int64_t k = min_block_key(p, i);
             k < static_cast<std::int64_t>(p.z); ++k) {
          const BlockId blk{i, g, k};
          const auto elems = block_elements(p, blk);
          EXPECT_LE(elems.size(), p.t);
          std::set<std::uint64_t> rows;
          for (Element e : elems) {
            EXPECT_EQ(block_of(p, e), blk);
            rows.insert(locate(p, e).row);
            covered.push_back(e);
          }
          EXPECT_EQ(rows.size(), elems.size());  // at most one element per row
        }
      }
    }
    std::sort(covered.begin(), covered.end());
    ASSERT_EQ(covered.size(), p.padded_universe());
    for (Element e = 0; e < p.padded_universe(); ++e) EXPECT_EQ(covered[e], e);
  }
}

TEST(Partition, CountLaws) {
  for (const auto& p : oracles::small_param_pool()) {
    for (std::uint64_t i = 1; i <= p.n; ++i) {
      EXPECT_EQ(blocks_per_grid(p, i), p.z + i * (p.t - 1));
      EXPECT_EQ(lines_per_superblock(p, i), p.x * p.z + i * (p.x * p.t - 1));
      // Keys realized by elements of one grid stay in the addressable range
      // and exhaust it whenever the grid is at least as wide as the slope.
      std::set<std::int64_t> keys;
      for (std::uint64_t a = 0; a < p.z; ++a) {
        for (std::uint64_t b = 0; b < p.t; ++b) {
          keys.insert(static_cast<std::int64_t>(a) -
                      static_cast<std::int64_t>(i * b));
        }
      }
      for (std::int64_t k : keys) {
        EXPECT_GE(k, min_block_key(p, i));
        EXPECT_LT(k, static_cast<std::int64_t>(p.z));
      }
      if (p.z >= i) EXPECT_EQ(keys.size(), blocks_per_grid(p, i));
    }
  }
}

TEST(Geometry, TwoBlocksShareAtMostOneT1Bit) {
  for (const auto& p : oracles::small_param_pool()) {
    std::vector<BlockId> blocks;
    for (std::uint64_t i = 1; i <= p.n; ++i) {
      for (std::uint64_t g = 0; g < p.x * p.x; ++g) {
        for (std::int64_t k = min_block_key(p, i);
             k < static_cast<std::int64_t>(p.z); ++k) {
          blocks.push_back(BlockId{i, g, k});
        }
      }
    }
    std::mt19937_64 rng(7);
    const std::size_t pairs = std::min<std::size_t>(2000, blocks.size() * blocks.size());
    for (std::size_t it = 0; it < pairs; ++it) {
      const BlockId& lhs = blocks[rng() % blocks.size()];
      const BlockId& rhs = blocks[rng() % blocks.size()];
      if (lhs == rhs) continue;
      std::set<std::uint64_t> r1, shared;
      for (Element e : block_elements(p, lhs)) r1.insert(e % p.superblock_size);
      for (Element e : block_elements(p, rhs)) {
        if (r1.count(e % p.superblock_size)) shared.insert(e % p.superblock_size);
      }
      if (lhs.superblock == rhs.superblock) {
        EXPECT_TRUE(shared.empty());
      } else {
        EXPECT_LE(shared.size(), 1u);
      }
    }
  }
}

}  // namespace

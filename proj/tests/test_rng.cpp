#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <boost/math/distributions/normal.hpp>

#include "isolab/rng.hpp"

using namespace isolab::rng;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, AddressesAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {0ull, 1ull, 1ull << 40})
    for (auto stream : {Stream::noise, Stream::triple_sampling})
      for (std::uint64_t trial : {0ull, 1ull, 1ull << 33})
        for (std::uint64_t block : {0ull, 1ull, 1ull << 32}) {
          EXPECT_TRUE(seen.insert(block_bits(seed, stream, trial, block)[0]).second);
        }
}

TEST(Philox, PureFunctionOfAddress) {
  EXPECT_EQ(block_bits(7, Stream::noise, 3, 9), block_bits(7, Stream::noise, 3, 9));
  EXPECT_EQ(normal_pair(7, Stream::noise, 3, 9), normal_pair(7, Stream::noise, 3, 9));
}

TEST(Uniform, OpenInterval) {
  EXPECT_GT(to_open_unit(0), 0.0);
  EXPECT_LT(to_open_unit(~0ull), 1.0);
  EXPECT_DOUBLE_EQ(to_open_unit(1ull << 63), 0.5 + 0x1.0p-53);
}

TEST(Uniform, Bounded) {
  EXPECT_EQ(bounded(0, 10), 0u);
  EXPECT_EQ(bounded(~0ull, 10), 9u);
  EXPECT_EQ(bounded(1ull << 63, 10), 5u);
}

TEST(Normal, MomentsOverManyBlocks) {
  double s = 0, ss = 0, s4 = 0;
  const int blocks = 200000;
  for (int b = 0; b < blocks; ++b) {
    for (double z : normal_pair(42, Stream::noise, 0, b)) {
      s += z;
      ss += z * z;
      s4 += z * z * z * z;
    }
  }
  const double n = 2.0 * blocks;
  EXPECT_NEAR(s / n, 0.0, 5 * std::sqrt(1.0 / n));
  EXPECT_NEAR(ss / n, 1.0, 5 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5 * std::sqrt(96.0 / n));
}

TEST(Normal, QuantileMatchesBoost) {
  const boost::math::normal dist;
  for (double p : {1e-300, 1e-20, 1e-9, 1e-5, 0.01, 0.0751, 0.2, 0.3, 0.5, 0.6, 0.92, 0.975, 0.999, 1 - 1e-12}) {
    const double ref = boost::math::quantile(dist, p);
    EXPECT_NEAR(normal_quantile(p), ref, 1e-14 * std::max(1.0, std::abs(ref))) << "p=" << p;
  }
  for (int k = 0; k < 1024; ++k) {
    const double p = (k + 0.5) / 1024.0;  // p and 1 - p both exact
    ASSERT_NEAR(normal_quantile(p), boost::math::quantile(dist, p), 1e-14);
    ASSERT_EQ(normal_quantile(p), -normal_quantile(1.0 - p));
  }
}

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace mrfpic;
using fixtures::as_map;
using fixtures::naive_count;

TEST(BlockKey, RoundTripPackedAndWide) {
  std::mt19937_64 rng(5);
  for (int m : {2, 3, 7, 200}) {
    for (int len : {0, 1, 5, 80, 129, 300}) {
      std::vector<std::uint8_t> b(static_cast<std::size_t>(len));
      for (auto& x : b) x = static_cast<std::uint8_t>(rng() % static_cast<unsigned>(m));
      const BlockKey k = BlockKey::encode(b, m);
      EXPECT_EQ(k.decode(m), b);
      if (len > 0) {
        EXPECT_EQ(k.last_symbol(m), b.back());
        EXPECT_EQ(k.drop_last(m).append(b.back(), m), k);
      }
    }
  }
  EXPECT_EQ(BlockKey::packed_capacity(2), 128);
  EXPECT_EQ(BlockKey::packed_capacity(3), 80);
}

TEST(CountBlocks, AlternatingChain) {
  // 0 1 0 1 0 1: window width 1 gives sites 1..4; Gamma = {-1, 1}.
  const Sample s(Region::from_dims({6}), 2, {0, 1, 0, 1, 0, 1});
  const Neighborhood g(1, {Site({-1}), Site({1})});
  const CountTable t = count_blocks(s, g);
  EXPECT_EQ(t.total(), 4U);
  const std::vector<std::uint8_t> b010{0, 0, 1}, b101{1, 1, 0};
  EXPECT_EQ(t.count(BlockKey::encode(b010, 2)), 2U);
  EXPECT_EQ(t.count(BlockKey::encode(b101, 2)), 2U);
  EXPECT_EQ(t.distinct(), 2U);
}

TEST(CountBlocks, ConstantSample) {
  const Sample s(Region::from_dims({12, 12}), 3, std::vector<std::uint8_t>(144, 2));
  const CountTable t = count_blocks(s, fixtures::nn2());
  EXPECT_EQ(t.distinct(), 1U);
  EXPECT_EQ(t.total(), window(s.region)->volume());
}

TEST(CountBlocks, MatchesNaiveRecount) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 2;
    const int m = 2 + (trial / 2) % 2;
    const std::vector<int> dims = d == 1 ? std::vector<int>{static_cast<int>(5 + rng() % 40)}
                                         : std::vector<int>{static_cast<int>(3 + rng() % 14), static_cast<int>(3 + rng() % 14)};
    const Sample s = fixtures::random_sample(rng, dims, m);
    for (const auto& g : enumerate_neighborhoods(d == 1 ? 2 : 1, d)) {
      ASSERT_EQ(as_map(count_blocks(s, g)), naive_count(s, g, window(s.region)));
      ASSERT_EQ(as_map(count_blocks(s, g, 2)), naive_count(s, g, shrink(s.region, 2)));
    }
  }
}

TEST(CountBlocks, TotalsEqualWindowVolumeWithinWidth) {
  std::mt19937_64 rng(3);
  const Sample s = fixtures::random_sample(rng, {16, 16}, 2);
  ASSERT_EQ(window_width(s.region), 1);
  for (const auto& g : enumerate_neighborhoods(1, 2)) {
    const CountTable t = count_blocks(s, g);
    std::uint64_t sum = 0;
    for (const auto& [k, n] : t.marginal()) sum += n;
    EXPECT_EQ(sum, window(s.region)->volume());
    EXPECT_EQ(t.total(), sum);
  }
}

TEST(CountBlocks, TranslationInvariance) {
  std::mt19937_64 rng(8);
  const Sample s = fixtures::random_sample(rng, {20, 20}, 2);
  // Embed at an offset in a larger box filled with a fixed pattern; counts over the inner box's
  // interior must not depend on where it sits.
  const Neighborhood g = fixtures::nn2();
  const auto inner = shrink(s.region, 1);
  auto base = naive_count(s, g, inner);
  Sample big(Region::from_dims({31, 27}), 2, std::vector<std::uint8_t>(31 * 27, 0));
  for (std::size_t i = 0; i < s.region.volume(); ++i) {
    Site x = s.region.site_at(i);
    big.symbols[big.region.linear_index(x + Site({7, 4}))] = s.symbols[i];
  }
  const Region moved(inner->lo() + Site({7, 4}), inner->hi() + Site({7, 4}));
  EXPECT_EQ(naive_count(big, g, moved), base);
  CountTable t(g, 2, 0);
  detail::count_into(t, big, moved);
  EXPECT_EQ(as_map(t), base);
}

TEST(Project, IdentityAndEmpty) {
  std::mt19937_64 rng(2);
  const Sample s = fixtures::random_sample(rng, {30, 30}, 3);
  const Neighborhood ball = enumerate_neighborhoods(1, 2).back();
  const CountTable full = count_blocks(s, ball);
  EXPECT_EQ(project(full, ball), full);
  const CountTable empty = project(full, Neighborhood(2));
  EXPECT_EQ(empty.distinct(), 3U);
  EXPECT_EQ(empty, count_blocks(s, Neighborhood(2)));
}

TEST(Project, EqualsDirectCounting) {
  std::mt19937_64 rng(4);
  for (int m : {2, 3}) {
    const Sample s = fixtures::random_sample(rng, {16, 16}, m);
    const Neighborhood ball = enumerate_neighborhoods(1, 2).back();
    const CountTable full = count_blocks(s, ball, 1);
    for (const auto& g : enumerate_neighborhoods(1, 2)) EXPECT_EQ(project(full, g), count_blocks(s, g, 1));
  }
  const Sample s = fixtures::random_sample(rng, {16, 16}, 2);
  const CountTable full = count_blocks(s, Neighborhood::symmetrized(2, half_ball(2, 2)), 2);
  int n = 0;
  for (const auto& g : enumerate_neighborhoods(2, 2)) {
    if (n++ % 37) continue;
    EXPECT_EQ(project(full, g), count_blocks(s, g, 2));
  }
}

TEST(Project, Preconditions) {
  std::mt19937_64 rng(6);
  const Sample s = fixtures::random_sample(rng, {16, 16}, 2);
  const CountTable nn = count_blocks(s, fixtures::nn2());
  EXPECT_THROW(project(nn, Neighborhood::symmetrized(2, {Site({1, 1})})), ValidationError);
  const CountTable wide = count_blocks(s, Neighborhood::symmetrized(2, {Site({2, 0})}));  // radius 2 > w = 1
  EXPECT_THROW(project(wide, Neighborhood(2)), ValidationError);
}

TEST(Sieves, RadiusZeroIsOneClass) {
  std::mt19937_64 rng(1);
  const Sample s = fixtures::random_sample(rng, {10, 10}, 2);
  const SieveCounts sv = count_sieves(s, Neighborhood(2), 0);
  EXPECT_EQ(sv.by_offset.size(), 1U);
  EXPECT_EQ(sv.combined(), count_blocks(s, Neighborhood(2)));
}

TEST(Sieves, OneDimensionalClasses) {
  // [0,12), w = 1, sites 1..10; period 5 with offsets -2..2.
  std::mt19937_64 rng(1);
  const Sample s = fixtures::random_sample(rng, {12}, 2);
  const Neighborhood g(1, {Site({-1}), Site({1})});
  const SieveCounts sv = count_sieves(s, g, 1);
  EXPECT_EQ(sv.period(), 5);
  ASSERT_EQ(sv.by_offset.size(), 5U);
  for (const auto& [k, t] : sv.by_offset) EXPECT_EQ(t.total(), 2U) << k.to_string();
  EXPECT_EQ(sieve_offset(Site({3}), 1), Site({-2}));
  EXPECT_EQ(sieve_offset(Site({-3}), 1), Site({2}));
}

TEST(Sieves, PartitionIdentity) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Sample s = fixtures::random_sample(rng, {static_cast<int>(6 + rng() % 20), static_cast<int>(6 + rng() % 20)}, 2 + trial % 2);
    for (const auto& g : enumerate_neighborhoods(1, 2)) {
      for (int r = 0; r <= 2; ++r) {
        const SieveCounts sv = count_sieves(s, g, r);
        EXPECT_EQ(sv.by_offset.size(), static_cast<std::size_t>((4 * r + 1) * (4 * r + 1)));
        EXPECT_EQ(sv.combined(), count_blocks(s, g));
      }
    }
  }
}

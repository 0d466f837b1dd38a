#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mrfpic/lattice.hpp"

using namespace mrfpic;

TEST(Window, TenByTen) {
  const Region r = Region::from_dims({10, 10});
  EXPECT_EQ(window_width(r), 1);
  const auto w = window(r);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->lo(), Site({1, 1}));
  EXPECT_EQ(w->hi(), Site({9, 9}));
  EXPECT_EQ(w->volume(), 64U);
}

TEST(Window, TinyRegionsKeepEverything) {
  EXPECT_EQ(window_width(Region::from_dims({2})), 0);
  EXPECT_EQ(window(Region::from_dims({2}))->volume(), 2U);
  EXPECT_EQ(window_width(Region::from_dims({1, 1})), 0);
}

TEST(Window, ThreeByThreeLeavesTheCenter) {
  const auto w = window(Region::from_dims({3, 3}));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->volume(), 1U);
  EXPECT_EQ(w->lo(), Site({1, 1}));
}

TEST(Window, ExhaustedAxisIsEmpty) { EXPECT_FALSE(window(Region::from_dims({2, 100}))); }

TEST(Window, WidthIsMonotoneInSize) {
  for (int d = 1; d <= 3; ++d) {
    int prev = 0;
    for (int l = 1; l <= 4000; l = l * 3 / 2 + 1) {
      const int w = window_width(Region::from_dims(std::vector<int>(static_cast<std::size_t>(d), l)));
      EXPECT_GE(w, prev);
      prev = w;
    }
  }
}

TEST(Window, NestedRegionsGiveNestedWindows) {
  const Region a = Region::from_dims({40, 40});
  const Region b = Region::from_dims({300, 300});
  EXPECT_LE(window_width(a), window_width(b));
  EXPECT_TRUE(b.contains(*window(b)));
}

TEST(RadiusSchedule, Values) {
  EXPECT_EQ(radius_schedule(64, 1.0, 2), 1);
  EXPECT_EQ(radius_schedule(1, 1.0, 1), 0);
  EXPECT_EQ(radius_schedule(64, 1e-4, 2), 0);
  EXPECT_EQ(radius_schedule(std::uint64_t{1} << 40, 1.0, 1), 5);  // ceil(27.7) = 28
}

TEST(RadiusSchedule, RejectsBadAlpha) {
  EXPECT_THROW(radius_schedule(64, 0.0, 2), ValidationError);
  EXPECT_THROW(radius_schedule(64, 1.5, 2), ValidationError);
  EXPECT_THROW(radius_schedule(64, std::nan(""), 2), ValidationError);
}

TEST(RadiusSchedule, NondecreasingInVolume) {
  int prev = 0;
  for (std::uint64_t v = 1; v < (std::uint64_t{1} << 50); v = v * 2 + 1) {
    const int r = radius_schedule(v, 0.5, 1);
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(Neighborhood, RejectsAsymmetricAndOrigin) {
  EXPECT_THROW(Neighborhood(1, {Site({1})}), ValidationError);
  EXPECT_THROW(Neighborhood(1, {Site({0})}), ValidationError);
  EXPECT_THROW(Neighborhood(1, {Site({1}), Site({-1}), Site({1})}), ValidationError);
  EXPECT_NO_THROW(Neighborhood(1, {Site({-1}), Site({1})}));
}

TEST(Neighborhood, RadiusAndText) {
  const Neighborhood g = Neighborhood::symmetrized(2, {Site({1, 0}), Site({2, -1})});
  EXPECT_EQ(g.size(), 4U);
  EXPECT_EQ(g.radius(), 2);
  EXPECT_EQ(g.to_string(), "(-2,1);(-1,0);(1,0);(2,-1)");
  EXPECT_EQ(Neighborhood(2).to_string(), "{}");
}

TEST(Enumerate, RadiusOneInTwoDims) {
  const auto fam = enumerate_neighborhoods(1, 2);
  EXPECT_EQ(fam.size(), 16U);
  EXPECT_TRUE(fam.front().empty());
  EXPECT_EQ(fam.back().size(), 8U);
  for (std::size_t i = 1; i < fam.size(); ++i) EXPECT_TRUE(canonical_less(fam[i - 1], fam[i]));
}

TEST(Enumerate, RadiusTwoInOneDim) {
  const auto fam = enumerate_neighborhoods(2, 1);
  std::vector<std::string> got;
  for (const auto& g : fam) got.push_back(g.to_string());
  const std::vector<std::string> want{"{}", "(-2);(2)", "(-1);(1)", "(-2);(-1);(1);(2)"};
  EXPECT_EQ(got, want);
}

TEST(Enumerate, RadiusZero) {
  const auto fam = enumerate_neighborhoods(0, 3);
  ASSERT_EQ(fam.size(), 1U);
  EXPECT_TRUE(fam[0].empty());
}

TEST(Enumerate, CountIsTwoToTheHalfBall) {
  for (int d = 1; d <= 2; ++d) {
    for (int r = 0; r <= 2; ++r) {
      const std::uint64_t h = half_ball_size(r, d);
      EXPECT_EQ(h, (static_cast<std::uint64_t>(std::pow(2 * r + 1, d)) - 1) / 2);
      const auto fam = enumerate_neighborhoods(r, d);
      EXPECT_EQ(fam.size(), std::size_t{1} << h) << "r=" << r << " d=" << d;
      std::set<std::string> distinct;
      for (const auto& g : fam) {
        EXPECT_LE(g.radius(), r);
        distinct.insert(g.to_string());
      }
      EXPECT_EQ(distinct.size(), fam.size());
    }
  }
}

TEST(Enumerate, CapIsEnforced) {
  EXPECT_THROW(enumerate_neighborhoods(3, 2), ResourceError);  // 2^24
  EXPECT_THROW(enumerate_neighborhoods(1, 2, 8), ResourceError);
}

TEST(BlockCount, HandValues) {
  EXPECT_EQ(block_count_exact(1, 1, 2), 10U);
  EXPECT_NEAR(block_count_bound(1, 1, 2), std::pow(5.0, 1.5), 1e-12);
  EXPECT_EQ(block_count_exact(0, 1, 3), 3U);
  EXPECT_EQ(block_count_exact(1, 2, 2), 1250U);
}

TEST(BlockCount, MatchesEnumerationAndBound) {
  for (int d = 1; d <= 2; ++d) {
    for (int r = 0; r <= 2; ++r) {
      for (int m = 2; m <= 3; ++m) {
        std::uint64_t sum = 0;
        for (const auto& g : enumerate_neighborhoods(r, d)) {
          sum += static_cast<std::uint64_t>(std::pow(m, static_cast<double>(g.size() + 1)));
        }
        EXPECT_EQ(block_count_exact(r, d, m), sum) << r << ' ' << d << ' ' << m;
        EXPECT_LE(static_cast<double>(sum), block_count_bound(r, d, m) * (1 + 1e-12));
      }
    }
  }
}

TEST(BlockCount, OverflowIsReported) { EXPECT_THROW(block_count_exact(5, 2, 3), OverflowError); }

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace mrfpic;

namespace {

/// Gamma0 block of `site` in configuration `config`, read on the torus `dims`.
std::vector<std::uint8_t> torus_block(const ExactJoint& ex, const Potential& p, std::uint64_t config, std::size_t site) {
  const Region box = Region::from_dims(ex.dims());
  const Site x = box.site_at(site);
  std::vector<std::uint8_t> block;
  for (const Site& v : p.interaction_neighborhood().offsets()) {
    Site y = x + v;
    for (int k = 0; k < box.dim(); ++k) y[k] = ((y[k] % ex.dims()[k]) + ex.dims()[k]) % ex.dims()[k];
    block.push_back(static_cast<std::uint8_t>(ex.symbol(config, box.linear_index(y))));
  }
  return block;
}

}  // namespace

TEST(Potential, ZeroCouplingIsUniform) {
  const Potential p = Potential::ising(2, 0.0);
  EXPECT_TRUE(p.interaction_neighborhood().empty());
  const Specification spec = spec_from_potential(p);
  EXPECT_EQ(spec.rows().size(), 1U);
  EXPECT_DOUBLE_EQ(spec.q_min(), 0.5);
}

TEST(Potential, IsingHandValues) {
  const Potential p = Potential::ising(2, 0.25);
  EXPECT_EQ(p.interaction_neighborhood(), fixtures::nn2());
  const Specification spec = spec_from_potential(p);
  EXPECT_EQ(spec.rows().size(), 16U);
  const std::vector<std::uint8_t> up{1, 1, 1, 1};
  const BlockKey k = BlockKey::encode(up, 2);
  EXPECT_NEAR(spec.probability(k, 1), 1.0 / (1.0 + std::exp(-2.0)), 1e-12);
  EXPECT_NEAR(spec.probability(k, 1), 0.8808, 1e-4);
  EXPECT_NEAR(spec.q_min(), 0.1192, 1e-4);
  EXPECT_TRUE(spec.normalized());
}

TEST(Potential, PottsIndicator) {
  const Potential p = Potential::potts(1, 3, 1.0);
  const std::vector<std::uint8_t> block{2, 2};
  const auto q = p.conditional(block);
  const double z = 2.0 + std::exp(2.0);
  EXPECT_NEAR(q[2], std::exp(2.0) / z, 1e-12);
  EXPECT_NEAR(q[0], 1.0 / z, 1e-12);
}

TEST(Potential, FlipSymmetryWithoutField) {
  const Potential p = Potential::ising(2, 0.4, 1, true);
  const Specification spec = spec_from_potential(p);
  for (const auto& [k, row] : spec.rows()) {
    auto b = k.decode(2);
    for (auto& x : b) x = static_cast<std::uint8_t>(1 - x);
    EXPECT_NEAR(row[0], spec.probability(BlockKey::encode(b, 2), 1), 1e-15);
  }
}

TEST(Potential, CanonicalizesAndRejectsDuplicates) {
  const Potential p(1, 2, {{Site({-2}), 0.3}});
  EXPECT_EQ(p.terms()[0].offset, Site({2}));
  EXPECT_EQ(p.range(), 2);
  EXPECT_THROW(Potential(1, 2, {{Site({1}), 0.1}, {Site({-1}), 0.2}}), ValidationError);
  EXPECT_THROW(Potential(1, 2, {{Site({0}), 0.1}}), ValidationError);
  EXPECT_THROW(Potential(1, 1, {}), ValidationError);
}

TEST(Potential, ZeroCouplingsLeaveGammaZero) {
  const Potential p(2, 2, {{Site({1, 0}), 0.5}, {Site({0, 1}), 0.0}});
  EXPECT_EQ(p.interaction_neighborhood().to_string(), "(-1,0);(1,0)");
}

TEST(AlphaBound, HandValues) {
  EXPECT_NEAR(alpha_bound(0.1192, 2, 2), 1.064e-4, 1e-6);
  EXPECT_NEAR(alpha_bound(0.5, 1, 2), 3.57e-3, 1e-5);
  EXPECT_THROW(alpha_bound(0.0, 2, 2), ValidationError);
  EXPECT_THROW(alpha_bound(0.6, 2, 2), ValidationError);
}

TEST(ExactJoint, SingleSiteConditionalsMatchSpecification) {
  const std::vector<std::pair<Potential, std::vector<int>>> cases{
      {Potential::ising(1, 0.7), {5}},
      {Potential::ising(1, -0.4, 2, true, 0.2), {7}},
      {Potential::ising(2, 0.3), {3, 4}},
      {Potential::ising(2, 0.5, 1, true), {3, 3}},
      {Potential::potts(1, 3, 0.8), {6}},
  };
  for (const auto& [p, dims] : cases) {
    const ExactJoint ex = exact_joint_tiny(p, dims);
    const Specification spec = spec_from_potential(p);
    for (std::uint64_t c = 0; c < ex.states(); c += 3) {
      for (std::size_t s = 0; s < ex.sites(); ++s) {
        const auto got = ex.single_site_conditional(c, s);
        const BlockKey k = BlockKey::encode(torus_block(ex, p, c, s), p.alphabet());
        for (int a = 0; a < p.alphabet(); ++a) ASSERT_NEAR(got[a], spec.probability(k, a), 1e-10);
      }
    }
  }
}

TEST(ExactJoint, FiniteSetConditionalsBoundedByQmin) {
  const Potential p = Potential::ising(1, 0.6, 2, true);
  const ExactJoint ex = exact_joint_tiny(p, {6});
  const double q = spec_from_potential(p).q_min();
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      std::vector<std::size_t> phi;
      for (std::size_t k = 0; k < 6; ++k) {
        if (k != i && k != j && (k + i) % 2 == 0) phi.push_back(k);
      }
      for (int ai = 0; ai < 2; ++ai) {
        for (int aj = 0; aj < 2; ++aj) {
          for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << phi.size()); ++mask) {
            std::vector<int> aphi;
            for (std::size_t t = 0; t < phi.size(); ++t) aphi.push_back(static_cast<int>(mask >> t & 1U));
            EXPECT_GE(ex.conditional({i}, {ai}, phi, aphi), q - 1e-15);
            EXPECT_GE(ex.conditional({i, j}, {ai, aj}, phi, aphi), q * q - 1e-15);
          }
        }
      }
    }
  }
}

TEST(ExactJoint, Guards) {
  EXPECT_THROW(exact_joint_tiny(Potential::ising(1, 0.1), {2}), ValidationError);
  EXPECT_THROW(exact_joint_tiny(Potential::ising(2, 0.1), {5, 5}), ResourceError);
  EXPECT_NO_THROW(exact_joint_tiny(Potential::ising(1, 0.1), {2}, false));
}

TEST(Specification, ProbabilityOnWiderNeighborhood) {
  const Potential p = Potential::ising(1, 0.5);
  const Specification spec = spec_from_potential(p);
  const Neighborhood wide = Neighborhood::symmetrized(1, {Site({1}), Site({2})});  // (-2);(-1);(1);(2)
  const std::vector<std::uint8_t> block{0, 1, 1, 0};
  const std::vector<std::uint8_t> own{1, 1};
  EXPECT_DOUBLE_EQ(spec.probability_on(wide, block, 1), spec.probability(BlockKey::encode(own, 2), 1));
  EXPECT_THROW(spec.probability_on(Neighborhood(1), {}, 0), ValidationError);
}

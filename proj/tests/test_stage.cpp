#include "generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using sepg::free_element;
using sepg::generator;
using sepg::ordinal;

namespace {

ordinal O(const char* s) { return ordinal::parse(s); }

sepg::ladder_system two_simple(std::size_t blocks) {
  sepg::ladder_system sys(O("w^3*2"));
  sys.add(sepg::make_simple_special(O("w^2*1"), blocks));
  sys.add(sepg::make_simple_special(O("w^2*2"), blocks));
  return sys;
}

TEST(BuildStage, SingleLadderPresetRelations) {
  const auto cfg = sepg::group_config::uniform(two_simple(8), {1});
  const auto sg = sepg::build_stage(cfg, O("w^3"), 5);
  ASSERT_EQ(sg.relations().size(), 10u);
  const ordinal d = O("w^2*2");
  const auto& l = sg.config().system.at(d);
  for (std::size_t n = 0; n < 5; ++n) {
    free_element want(generator::z(d, n + 1), sepg::rational(cfg.psi(n)));
    want.add(generator::z(d, n), -1).add(generator::x(l.entry(n)), -1);
    EXPECT_EQ(sg.relations()[5 + n], want);
  }
}

TEST(BuildStage, PairedPresetRelations) {
  auto paired = gen::companion(two_simple(8), {2});
  const auto cfg = sepg::group_config::uniform(paired, {1, -1});
  const auto sg = sepg::build_stage(cfg, O("w^3"), 4);
  const ordinal d = O("w^2*1");
  const auto& l = sg.config().system.at(d);
  for (std::size_t n = 0; n < 4; ++n) {
    free_element want(generator::z(d, n + 1), sepg::rational(cfg.psi(n)));
    want.add(generator::z(d, n), -1)
        .add(generator::x(l.entry(2 * n)), -1)
        .add(generator::x(l.entry(2 * n + 1)), 1);
    EXPECT_EQ(sg.relations()[n], want);
  }
}

TEST(BuildStage, EmptySystemIsFreeOnXs) {
  const auto cfg = sepg::group_config::uniform(two_simple(4), {1});
  const auto sg = sepg::build_stage(cfg, O("w^2"), 3, {O("5"), O("w*3+2")});
  EXPECT_TRUE(sg.relations().empty());
  EXPECT_EQ(sg.basis().size(), 2u);
  for (const auto& g : sg.basis()) EXPECT_TRUE(g.is_x());
}

TEST(FiltrationSubgroup, BottomClusterAndTop) {
  const auto cfg = sepg::group_config::uniform(two_simple(6), {1});
  const auto sg = sepg::build_stage(cfg, O("w^3"), 3, {O("4"), O("w*9")});
  const auto bottom = sepg::filtration_subgroup(sg, O("0"));
  ASSERT_EQ(bottom.basis.size(), 1u);
  EXPECT_EQ(bottom.basis[0], generator::x(O("4")));
  const auto above = sepg::filtration_subgroup(sg, O("w^2*1+1"));
  bool has_z = false;
  for (const auto& g : above.basis) has_z |= g == generator::z(O("w^2*1"), 3);
  EXPECT_TRUE(has_z);
  EXPECT_EQ(sepg::filtration_subgroup(sg, sg.alpha()).basis, sg.basis());
  EXPECT_THROW(sepg::filtration_subgroup(sg, O("w^3+1")), sepg::scope_error);
}

TEST(FiltrationSubgroup, MonotoneAndPureOnExploredLevels) {
  gen::rng r(41);
  for (int i = 0; i < 20; ++i) {
    const auto sizes = gen::block_sizes(r);
    const auto sys = gen::companion(gen::simple_system(r, 3, 6), sizes);
    const auto sg = sepg::build_stage(gen::config(sys, gen::rows_for(r, sizes)), sys.alpha(), 4);
    std::vector<generator> prev;
    for (const auto& mu : sepg::explored_levels(sg)) {
      const auto f = sepg::filtration_subgroup(sg, mu);
      EXPECT_TRUE(f.pure);
      EXPECT_TRUE(std::includes(f.basis.begin(), f.basis.end(), prev.begin(), prev.end()) ||
                  f.basis.size() >= prev.size());
      for (const auto& g : prev)
        EXPECT_NE(std::find(f.basis.begin(), f.basis.end(), g), f.basis.end());
      prev = f.basis;
    }
  }
}

TEST(Projection, AboveEverythingIsIdentity) {
  const auto cfg = sepg::group_config::uniform(two_simple(6), {1});
  const auto sg = sepg::build_stage(cfg, O("w^3"), 4);
  const auto p = sepg::projection(sg, O("w^3"));
  for (const auto& g : sg.generators()) EXPECT_EQ(p.map.image(g), free_element(g));
  EXPECT_THROW(sepg::projection(sg, O("w^2*2")), sepg::scope_error);
}

TEST(Projection, UnrolledRecursionBetweenLadderPoints) {
  // eta(n) = w*(n+1)+1 on w^2; nu = w*2+5 keeps x_eta(0), x_eta(1).
  sepg::ladder_system sys(O("w^3"));
  sys.add(sepg::make_simple_special(O("w^2"), 6));
  const auto cfg = sepg::group_config::uniform(sys, {1});
  const auto sg = sepg::build_stage(cfg, O("w^3"), 4);
  const ordinal d = O("w^2");
  const auto p = sepg::projection(sg, O("w*2+5"));
  EXPECT_EQ(p.report.cutoff.at(d), 2u);
  const auto x0 = generator::x(O("w*1+1")), x1 = generator::x(O("w*2+1"));
  EXPECT_EQ(p.map.image(generator::z(d, 2)), free_element{});
  EXPECT_EQ(p.map.image(generator::z(d, 1)), -free_element(x1));
  EXPECT_EQ(p.map.image(generator::z(d, 0)), -(free_element(x0) + x1));
  EXPECT_EQ(p.map.image(generator::x(O("w*3+1"))), free_element{});
  EXPECT_TRUE(p.report.ok());
  EXPECT_TRUE(oracle::projection(sg, O("w*2+5")).ok());
}

TEST(ProjectionProperty, SeparabilityWitnessOnRandomStages) {
  gen::rng r(42);
  std::size_t levels = 0;
  for (int i = 0; i < 12; ++i) {
    const auto sizes = gen::block_sizes(r);
    const auto sys = gen::companion(gen::simple_system(r, 1 + gen::below(r, 4), 6), sizes);
    const auto sg = sepg::build_stage(gen::config(sys, gen::rows_for(r, sizes)), sys.alpha(),
                                      2 + gen::below(r, 4));
    for (const auto& nu : oracle::sample_levels(sg, 12)) {
      const auto p = sepg::projection(sg, nu);
      EXPECT_TRUE(p.report.ok()) << nu;
      const auto t = oracle::projection(sg, nu);
      EXPECT_TRUE(t.ok()) << nu << ": " << (t.ok() ? "" : t.mismatches.front());
      ++levels;
    }
  }
  EXPECT_GE(levels, 120u);
}

TEST(FreenessBasis, SingleXAndTwoZs) {
  const auto cfg = sepg::group_config::uniform(two_simple(6), {1});
  const auto sg = sepg::build_stage(cfg, O("w^3"), 4, {O("w*9+3")});
  const auto one = sepg::freeness_basis(sg, {generator::x(O("w*9+3"))});
  EXPECT_EQ(one.basis, std::vector<generator>{generator::x(O("w*9+3"))});
  EXPECT_TRUE(one.ok());

  const ordinal d = O("w^2*1");
  const auto& l = sg.config().system.at(d);
  const auto two = sepg::freeness_basis(sg, {generator::z(d, 0), generator::z(d, 1)});
  EXPECT_EQ(two.uniform_m, 1u);
  std::vector<generator> want{generator::z(d, 1)};
  for (std::size_t n = 0; n < l.block_start(2); ++n) want.push_back(generator::x(l.entry(n)));
  EXPECT_EQ(two.basis, want);
  EXPECT_TRUE(two.ok());
}

TEST(FreenessBasis, TwoDeltasShareNothingAndDeduplicate) {
  const auto cfg = sepg::group_config::uniform(two_simple(6), {1});
  const auto sg = sepg::build_stage(cfg, O("w^3"), 4);
  const ordinal d1 = O("w^2*1"), d2 = O("w^2*2");
  const auto& l1 = sg.config().system.at(d1);
  const auto fr = sepg::freeness_basis(
      sg, {generator::z(d1, 2), generator::z(d2, 1), generator::x(l1.entry(0))});
  EXPECT_EQ(fr.uniform_m, 2u);
  // psi(2) = 2: the pure closure needs z_{d,3} on each delta.
  std::size_t zs = 0, xs = 0;
  for (const auto& g : fr.basis) (g.is_z() ? zs : xs)++;
  EXPECT_EQ(zs, 2u);
  EXPECT_EQ(xs, 6u);
  EXPECT_TRUE(fr.ok());
  EXPECT_TRUE(oracle::freeness(sg, {generator::z(d1, 2), generator::z(d2, 1)}).ok());
}

TEST(FreenessProperty, AgreesWithBruteForceOnSmallSubsets) {
  const auto cfg = sepg::group_config::uniform(two_simple(6), {1});
  const auto sg = sepg::build_stage(cfg, O("w^3"), 4, {O("w*7+2")});
  const ordinal d1 = O("w^2*1"), d2 = O("w^2*2");
  const std::vector<generator> pool{generator::z(d1, 1), generator::z(d1, 3), generator::z(d2, 2),
                                    generator::x(O("w*1+1")), generator::x(O("w*7+2")),
                                    generator::x(sg.config().system.at(d2).entry(1))};
  std::size_t subsets = 0;
  for (unsigned mask = 1; mask < (1u << pool.size()); ++mask) {
    if (__builtin_popcount(mask) > 3) continue;
    std::vector<generator> T;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask >> i & 1) T.push_back(pool[i]);
    const auto t = oracle::freeness(sg, T);
    EXPECT_TRUE(t.ok()) << t.mismatches.size();
    ++subsets;
  }
  EXPECT_EQ(subsets, 41u);
}

}  // namespace

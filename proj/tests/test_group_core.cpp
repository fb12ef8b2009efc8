#include "generators.hpp"

#include <gtest/gtest.h>

#include <map>

using sepg::free_element;
using sepg::generator;
using sepg::integer;
using sepg::ordinal;
using sepg::rational;

namespace {

ordinal O(const char* s) { return ordinal::parse(s); }

sepg::group_config simple_config(const char* delta, std::size_t blocks,
                                 sepg::psi_function psi = sepg::psi_function::factorial()) {
  sepg::ladder_system sys(O("w^3*2"));
  sys.add(sepg::make_simple_special(O(delta), blocks));
  return sepg::group_config::uniform(sys, {1}, std::move(psi));
}

TEST(ZElement, ClosedFormOnSimpleLadder) {
  const auto cfg = simple_config("w^2", 6);
  const ordinal d = O("w^2");
  EXPECT_EQ(sepg::z_element(cfg, d, 0), free_element(generator::y(d)));
  const auto& l = cfg.system.at(d);
  free_element want(generator::y(d));
  want.add(generator::x(l.entry(0)), 1).add(generator::x(l.entry(1)), 1);
  EXPECT_EQ(sepg::z_element(cfg, d, 2), want);
  // psi(2) = 2 enters at n = 3: z_3 = (y + x0 + x1 + 2 x2... ) / 2 written out.
  free_element z3(generator::y(d), rational(1, 2));
  z3.add(generator::x(l.entry(0)), rational(1, 2))
      .add(generator::x(l.entry(1)), rational(1, 2))
      .add(generator::x(l.entry(2)), rational(1, 2));
  EXPECT_EQ(sepg::z_element(cfg, d, 3), z3);
}

TEST(RelationElement, SingleLadderPresetFormalShape) {
  const auto cfg = simple_config("w^2*2", 8);
  const ordinal d = O("w^2*2");
  for (std::size_t n = 0; n < 6; ++n) {
    const auto g = sepg::formal_relation(cfg, d, n);
    free_element want;
    want.add(generator::z(d, n + 1), rational(cfg.psi(n)))
        .add(generator::z(d, n), -1)
        .add(generator::x(cfg.system.at(d).entry(n)), -1);
    EXPECT_EQ(g, want);
    EXPECT_TRUE(sepg::relation_element(cfg, d, n).is_zero());
  }
}

TEST(RelationElement, TwistSubtractsW) {
  const auto cfg = simple_config("w^2", 6);
  const ordinal d = O("w^2");
  sepg::coloring c;
  c.colors[d] = {0, 1, 0, 1, 0};
  const auto plain = sepg::formal_relation(cfg, d, 1);
  auto twisted = sepg::formal_relation(cfg, d, 1, &c);
  EXPECT_EQ(twisted, plain - free_element(generator::w()));
  EXPECT_TRUE(sepg::relation_element(cfg, d, 1, &c).is_zero());
  EXPECT_TRUE(sepg::relation_element(cfg, d, 3, &c).is_zero());
}

TEST(StageRewrite, UnrolledFormulaForZZero) {
  const auto cfg = simple_config("w^2", 6);
  const ordinal d = O("w^2");
  const auto& l = cfg.system.at(d);
  // z_0 = psi(0) z_1 - x0 = psi(0) psi(1) z_2 - psi(0) x1 - x0.
  free_element want(generator::z(d, 2), rational(cfg.psi(0) * cfg.psi(1)));
  want.add(generator::x(l.entry(1)), -rational(cfg.psi(0))).add(generator::x(l.entry(0)), -1);
  EXPECT_EQ(sepg::stage_rewrite(cfg, 2, generator::z(d, 0)), want);
  EXPECT_EQ(sepg::stage_rewrite(cfg, 2, generator::x(l.entry(3))),
            free_element(generator::x(l.entry(3))));
  EXPECT_EQ(sepg::stage_rewrite(cfg, 4, generator::z(d, 4)), free_element(generator::z(d, 4)));
  EXPECT_THROW(sepg::stage_rewrite(cfg, 2, generator::x(O("w^4"))), sepg::scope_error);
}

TEST(Membership, DenominatorsGivePureMultiples) {
  const auto cfg = simple_config("w^2", 6);
  const ordinal d = O("w^2");
  EXPECT_TRUE(sepg::membership(cfg, 3, generator::z(d, 2)).in_group);
  EXPECT_TRUE(sepg::membership(cfg, 3, generator::z(d, 3)).in_group);
  const auto half = sepg::membership(cfg, 3, free_element(generator::z(d, 3), rational(1, 2)));
  EXPECT_FALSE(half.in_group);
  EXPECT_EQ(*half.pure_multiple, 2);
  free_element e(generator::x(O("w+1")));
  e.add(generator::x(O("w*2+1")), rational(1, 3));
  const auto third = sepg::membership(cfg, 3, e);
  EXPECT_FALSE(third.in_group);
  EXPECT_EQ(*third.pure_multiple, 3);
}

TEST(VerifyHom, IdentityBrokenAndEmpty) {
  const auto cfg = simple_config("w^2", 6);
  const ordinal d = O("w^2");
  const auto& l = cfg.system.at(d);
  std::vector<free_element> rels;
  for (std::size_t n = 0; n < 4; ++n) rels.push_back(sepg::formal_relation(cfg, d, n));
  sepg::generator_map id;
  for (std::size_t n = 0; n <= 4; ++n) id.set(generator::z(d, n), generator::z(d, n));
  for (std::size_t i = 0; i < 4; ++i) id.set(generator::x(l.entry(i)), generator::x(l.entry(i)));
  const sepg::element_normalizer expand = [&](const free_element& e) {
    return sepg::expand_formal(cfg, e);
  };
  EXPECT_TRUE(sepg::verify_hom(id, rels, expand).ok());
  EXPECT_FALSE(sepg::verify_hom(id, rels).ok());

  auto broken = id;
  broken.set(generator::x(l.entry(2)), free_element(generator::x(l.entry(2))) + generator::x(l.entry(3)));
  const auto rep = sepg::verify_hom(broken, rels, expand);
  ASSERT_EQ(rep.failures.size(), 1u);
  EXPECT_EQ(rep.failures.front().first, 2u);
  EXPECT_TRUE(sepg::verify_hom(id, {}).ok());
  EXPECT_THROW(id.apply(generator::x(O("w*9+1"))), sepg::scope_error);
}

TEST(GroupCoreProperty, RelationIdentityOnRandomConfigs) {
  gen::rng r(31);
  for (int i = 0; i < 60; ++i) {
    const auto sizes = gen::block_sizes(r, 4);
    const auto sys = gen::companion(gen::simple_system(r, 1 + gen::below(r, 3), 1 + gen::below(r, 12)), sizes);
    const auto cfg = gen::config(sys, gen::rows_for(r, sizes));
    sepg::coloring c;
    for (const auto& d : sys.deltas())
      for (std::size_t n = 0; n < 13; ++n) c.colors[d].push_back(integer(gen::between(r, -2, 2)));
    for (const auto& [d, l] : sys.ladders())
      for (std::size_t n = 0; n < l.blocks(); ++n) {
        EXPECT_TRUE(sepg::relation_element(cfg, d, n).is_zero());
        EXPECT_TRUE(sepg::relation_element(cfg, d, n, &c).is_zero());
      }
  }
}

TEST(GroupCoreProperty, StageRewriteRoundTrip) {
  gen::rng r(32);
  for (int i = 0; i < 60; ++i) {
    const auto sizes = gen::block_sizes(r);
    const auto sys = gen::companion(gen::simple_system(r, 2, 6), sizes);
    const auto cfg = gen::config(sys, gen::rows_for(r, sizes));
    const std::size_t N = 1 + gen::below(r, 5);
    // Random element over the formal generators z_{d,n} (n <= N) and ladder x's.
    std::vector<generator> gens;
    for (const auto& [d, l] : sys.ladders()) {
      for (std::size_t n = 0; n <= N; ++n) gens.push_back(generator::z(d, n));
      for (std::size_t k = 0; k < l.block_start(N); ++k) gens.push_back(generator::x(l.entry(k)));
    }
    free_element e;
    for (const auto& g : gens)
      if (gen::below(r, 3) == 0) e.add(g, rational(gen::between(r, -4, 4), 1 + gen::below(r, 3)));
    const auto coords = sepg::stage_rewrite(cfg, N, e);
    // Rebuild from the basis {Z(d,N)} u X's and compare in the ambient module.
    EXPECT_EQ(sepg::expand_formal(cfg, coords), sepg::expand_formal(cfg, e));
    for (const auto& [g, _] : coords.terms())
      EXPECT_TRUE(g.is_x() || (g.is_z() && g.n == N)) << g.str();
  }
}

TEST(GroupCoreProperty, MembershipMatchesBruteForceOverBasis) {
  // One ladder, psi table with nontrivial values; basis {Z(d,3), x0, x1, x2}.
  const auto cfg = simple_config("w^2*2", 4, sepg::psi_function::table({2, 3, 2, 5, 7}));
  const ordinal d = O("w^2*2");
  const auto& l = cfg.system.at(d);
  const std::vector<generator> basis{generator::z(d, 3), generator::x(l.entry(0)),
                                     generator::x(l.entry(1)), generator::x(l.entry(2))};
  std::map<std::vector<std::pair<generator, rational>>, bool> span;
  auto key = [](const free_element& e) {
    return std::vector<std::pair<generator, rational>>(e.terms().begin(), e.terms().end());
  };
  const long B = 3;
  for (long a = -B; a <= B; ++a)
    for (long b = -B; b <= B; ++b)
      for (long c = -B; c <= B; ++c)
        for (long k = -B; k <= B; ++k) {
          free_element e;
          e.add(basis[0], a).add(basis[1], b).add(basis[2], c).add(basis[3], k);
          span[key(sepg::expand_formal(cfg, e))] = true;
        }
  gen::rng r(33);
  std::size_t members = 0;
  for (int i = 0; i < 3000; ++i) {
    // Coordinates in (1/q)Z with |coordinate| <= B.
    const long q = 1 + static_cast<long>(gen::below(r, 3));
    free_element e;
    for (const auto& g : basis) e.add(g, rational(gen::between(r, -B * q, B * q), q));
    const auto ambient = sepg::expand_formal(cfg, e);
    const bool oracle = span.count(key(ambient)) != 0;
    // Ambient input: membership must see through y and the x's.
    const auto m = sepg::membership(cfg, 3, ambient);
    EXPECT_EQ(m.in_group, oracle) << e.str();
    members += oracle;
    long least = 0;
    for (long k = 1; k <= 6 && !least; ++k) {
      const free_element ke = rational(k) * e;
      const auto scaled = sepg::expand_formal(cfg, ke);
      bool in_box = true;
      for (const auto& [g, c] : ke.terms()) in_box &= abs(c) <= B;
      if (in_box && span.count(key(scaled))) least = k;
      if (!in_box) break;
    }
    if (least) {
      EXPECT_EQ(*m.pure_multiple, least);
    }
  }
  EXPECT_GT(members, 100u);
}

}  // namespace

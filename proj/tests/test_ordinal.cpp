#include "generators.hpp"

#include <gtest/gtest.h>

using sepg::ordinal;

namespace {

ordinal O(const char* s) { return ordinal::parse(s); }

TEST(OrdinalCodec, RoundTripsCanonicalLiteral) {
  EXPECT_EQ(O("w^2*3+w*1+5").str(), "w^2*3+w*1+5");
  EXPECT_TRUE(O("0").is_zero());
  EXPECT_TRUE(O("0").terms().empty());
  EXPECT_EQ(O("w").str(), "w*1");
  EXPECT_EQ(O("w^3").str(), "w^3*1");
}

TEST(OrdinalCodec, RejectsMalformedLiterals) {
  for (const char* bad : {"w+w", "w^2+w^3", "", "w^", "3+w", "w*0", "w^2*1+", "x", "1+1", "w^1*2"})
    EXPECT_THROW(O(bad), sepg::parse_error) << bad;
}

TEST(OrdinalOrder, MatchesHandExamples) {
  EXPECT_GT(O("w"), O("100"));
  EXPECT_EQ(O("w^2+1"), O("w^2*1+1"));
  EXPECT_GT(O("w*2"), O("w+1000"));
  EXPECT_LT(O("w^2*3+w*7"), O("w^3"));
}

TEST(OrdinalAdd, AbsorbsLowerTerms) {
  EXPECT_EQ(O("w+1") + O("w"), O("w*2"));
  EXPECT_EQ(O("w^2*2") + O("w*3+4"), O("w^2*2+w*3+4"));
  EXPECT_EQ(O("5") + O("w"), O("w"));
  EXPECT_EQ(O("w^2*1+w*5+3") + O("w^2*2+1"), O("w^2*3+1"));
}

TEST(OrdinalClassify, ZeroSuccessorLimit) {
  EXPECT_EQ(O("w^2*3").classify(), sepg::ordinal_class::limit);
  EXPECT_EQ(O("w+7").classify(), sepg::ordinal_class::successor);
  EXPECT_EQ(O("0").classify(), sepg::ordinal_class::zero);
  EXPECT_TRUE(O("w^2*4").divisible_by_omega_sq());
  EXPECT_FALSE(O("w^2+w").divisible_by_omega_sq());
  EXPECT_TRUE(O("w^3").divisible_by_omega_sq());
  EXPECT_FALSE(O("0").is_limit());
}

TEST(OrdinalProperty, AdditionIsAssociativeWithZeroUnit) {
  gen::rng r(11);
  for (int i = 0; i < 2000; ++i) {
    const ordinal a = gen::ordinal(r), b = gen::ordinal(r), c = gen::ordinal(r);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a + ordinal{}, a);
    EXPECT_EQ(ordinal{} + a, a);
  }
}

TEST(OrdinalProperty, SumDominatesLeftSummand) {
  gen::rng r(12);
  for (int i = 0; i < 2000; ++i) {
    const ordinal a = gen::ordinal(r), b = gen::ordinal(r);
    EXPECT_LE(a, a + b);
    if (!b.is_zero()) {
      EXPECT_LT(a, a + b);
    }
  }
}

TEST(OrdinalProperty, CodecIsIdempotent) {
  gen::rng r(13);
  for (int i = 0; i < 2000; ++i) {
    const ordinal a = gen::ordinal(r, 6, 1000);
    EXPECT_EQ(O(a.str().c_str()), a);
    EXPECT_EQ(O(a.str().c_str()).str(), a.str());
  }
}

TEST(OrdinalProperty, OrderIsTotalAndMatchesTermComparison) {
  gen::rng r(14);
  for (int i = 0; i < 2000; ++i) {
    const ordinal a = gen::ordinal(r), b = gen::ordinal(r);
    const int n = (a < b) + (a == b) + (a > b);
    EXPECT_EQ(n, 1);
    // Adding w^7 on the right swamps both: a + w^7 = b + w^7.
    EXPECT_EQ(a + ordinal::omega_power(7), b + ordinal::omega_power(7));
  }
}

TEST(OrdinalProperty, LimitsAreSupremaOfSimpleLadders) {
  gen::rng r(15);
  for (int i = 0; i < 200; ++i) {
    const ordinal d = gen::delta(r);
    const auto l = sepg::make_simple_special(d, 12);
    for (const auto& e : l.entries()) EXPECT_LT(e, d);
    // Any threshold below d of the form d' + w^(e-1)*m is passed by index m.
    const auto& last = d.terms().back();
    std::vector<sepg::cnf_term> base = d.terms();
    if (--base.back().coefficient == 0) base.pop_back();
    for (std::uint64_t m = 1; m < 10; ++m) {
      const ordinal t = ordinal::from_terms(base) + ordinal::omega_power(last.exponent - 1, m);
      EXPECT_LE(sepg::first_index_reaching(l, t), m);
    }
  }
}

TEST(GeneratorLevel, AdmissionLevels) {
  using sepg::generator;
  EXPECT_EQ(sepg::generator_level(generator::x(O("5"))), O("0"));
  EXPECT_EQ(sepg::generator_level(generator::x(O("w*3+2"))), O("w*3"));
  EXPECT_EQ(sepg::generator_level(generator::y(O("w^2"), 4)), O("w^2+1"));
  EXPECT_EQ(sepg::generator_level(generator::z(O("w^2*2"), 0)), O("w^2*2+1"));
}

TEST(GeneratorLevel, MonotoneOnX) {
  gen::rng r(16);
  for (int i = 0; i < 2000; ++i) {
    const ordinal a = gen::ordinal(r), b = gen::ordinal(r);
    if (a <= b) {
      EXPECT_LE(sepg::generator_level(sepg::generator::x(a)),
                sepg::generator_level(sepg::generator::x(b)));
    }
  }
}

}  // namespace

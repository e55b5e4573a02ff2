#include "camo/attention.hpp"

#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace camo;

TEST_SUITE("attention")
{
  TEST_CASE("reverse attention")
  {
    ScalarMap s(1, 3), l(1, 3);
    s << 0.0, 1.0, 0.25;
    l << 0.0, 0.0, 0.75;
    const auto a = reverse_attention(s, l);
    CHECK(a(0, 0) == 1.0);
    CHECK(a(0, 1) == doctest::Approx(std::exp(1.0)));
    CHECK(a(0, 2) == doctest::Approx(std::exp(0.5)));
    CHECK_THROWS_AS(reverse_attention(s, ScalarMap(ScalarMap::Zero(2, 2))), Error);
  }

  TEST_CASE("reverse attention is symmetric and bounded")
  {
    Rng rng(61);
    for (int t = 0; t < 20; ++t)
    {
      const auto s = synth::random_map(rng, 9, 6);
      const auto l = synth::random_map(rng, 9, 6);
      const auto a = reverse_attention(s, l);
      CHECK((a - reverse_attention(l, s)).abs().maxCoeff() == 0.0);
      CHECK(a.minCoeff() >= 1.0);
      CHECK(a.maxCoeff() <= std::exp(1.0) + 1e-12);
      CHECK((reverse_attention(s, s) == 1.0).all());
    }
  }

  TEST_CASE("graded ranking attention")
  {
    RankMap r(1, 3);
    r << code(RankLabel::ES), code(RankLabel::HD), code(RankLabel::BG);
    const auto a = ranking_attention(r);
    CHECK(a(0, 0) == doctest::Approx(1.0 + std::exp(-1.0)));
    CHECK(a(0, 1) == doctest::Approx(1.0 + std::exp(-5.0)));
    CHECK(a(0, 2) == 1.0);
    CHECK(a(0, 0) > a(0, 1));
  }

  TEST_CASE("literal ranking attention")
  {
    RankMap r(1, 3);
    r << code(RankLabel::ES), code(RankLabel::M3), code(RankLabel::BG);
    const auto a = ranking_attention(r, RankingAttentionMode::Literal);
    CHECK(a(0, 0) == doctest::Approx(1.0 + std::exp(-1.0)));
    CHECK(a(0, 1) == a(0, 0));
    CHECK(a(0, 2) == 2.0);
  }

  TEST_CASE("graded attention decreases with rank code")
  {
    for (int c = 1; c < 5; ++c)
    {
      RankMap r(1, 2);
      r << c, c + 1;
      const auto a = ranking_attention(r);
      CHECK(a(0, 0) > a(0, 1));
      CHECK(a(0, 1) > 1.0);
    }
  }
}

#include "camo/fixation_metrics.hpp"
#include "camo/transport.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace camo;

namespace
{

ScalarMap random_distribution(Rng& rng, int w, int h)
{
  ScalarMap m = synth::random_map(rng, w, h);
  // Sprinkle exact zeros so the transport sees empty cells too.
  for (Eigen::Index i = 0; i < m.size(); ++i)
  {
    if (uniform_below(rng, 4) == 0) m.data()[i] = 0.0;
  }
  if (m.sum() == 0) m(0, 0) = 1;
  return to_distribution(m);
}

FixationPointSet random_fixations(Rng& rng, int w, int h, int max_count)
{
  std::vector<Pixel> pts;
  const int n = 1 + static_cast<int>(uniform_below(rng, max_count));
  for (int i = 0; i < n; ++i)
  {
    pts.push_back({static_cast<int>(uniform_below(rng, w)), static_cast<int>(uniform_below(rng, h))});
  }
  return FixationPointSet(w, h, pts);
}

}  // namespace

TEST_SUITE("fixation_metrics")
{
  TEST_CASE("sim")
  {
    ScalarMap p(1, 2), q(1, 2);
    p << 0.5, 0.5;
    q << 1, 0;
    CHECK(sim(p, q) == doctest::Approx(0.5));
    CHECK(sim(p, p) == doctest::Approx(1.0));
    ScalarMap a(1, 2), b(1, 2);
    a << 1, 0;
    b << 0, 1;
    CHECK(sim(a, b) == 0.0);
    ScalarMap raw(1, 2);
    raw << 2, 2;
    CHECK_THROWS_AS(sim(raw, p), Error);
  }

  TEST_CASE("cc")
  {
    Rng rng(1);
    const auto q = synth::random_map(rng, 6, 6);
    CHECK(cc(ScalarMap(3.0 * q + 1.0), q) == doctest::Approx(1.0));
    CHECK(cc(ScalarMap(2.0 - q), q) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(cc(ScalarMap(ScalarMap::Constant(6, 6, 0.2)), q), Error);
  }

  TEST_CASE("nss")
  {
    ScalarMap p(2, 2);
    p << 3, 1, 1, 1;
    CHECK(nss(p, FixationPointSet(2, 2, {{0, 0}})) == doctest::Approx(1.7320508).epsilon(1e-6));
    ScalarMap q(1, 3);
    q << 0, 1, 2;
    CHECK(std::abs(nss(q, FixationPointSet(3, 1, {{1, 0}}))) <= 1e-12);
    CHECK_THROWS_AS(nss(p, FixationPointSet(2, 2, {})), Error);
  }

  TEST_CASE("kld")
  {
    Rng rng(2);
    const auto p = random_distribution(rng, 5, 5);
    CHECK(std::abs(kld(p, p)) <= 1e-9);
    const ScalarMap u = ScalarMap::Constant(3, 3, 1.0 / 9);
    CHECK(std::abs(kld(u, u)) <= 1e-9);
    ScalarMap q(1, 2), half(1, 2);
    q << 1, 0;
    half << 0.5, 0.5;
    CHECK(kld(half, q) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  }

  TEST_CASE("kld is nonnegative")
  {
    Rng rng(8);
    for (int t = 0; t < 50; ++t)
    {
      const auto p = random_distribution(rng, 4, 4), q = random_distribution(rng, 4, 4);
      CHECK(kld(p, q) >= -1e-12);
    }
  }

  TEST_CASE("emd closed forms")
  {
    ScalarMap a = ScalarMap::Zero(5, 4), b = ScalarMap::Zero(5, 4);
    a(0, 0) = 1;
    b(4, 3) = 1;
    CHECK(emd(a, b) == doctest::Approx(5.0).epsilon(1e-12));
    ScalarMap c = ScalarMap::Zero(1, 3), d = ScalarMap::Zero(1, 3);
    c(0, 0) = 1;
    d(0, 1) = 0.5;
    d(0, 2) = 0.5;
    CHECK(emd(c, d) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(emd(a, a) <= 1e-9);
  }

  TEST_CASE("emd matches the LP oracle")
  {
    Rng rng(99);
    for (int t = 0; t < 50; ++t)
    {
      const auto p = random_distribution(rng, 4, 4), q = random_distribution(rng, 4, 4);
      const double expected = oracle::emd_lp(p, q);
      const double got = emd(p, q);
      CHECK(std::abs(got - expected) <= 1e-6 * std::max(1.0, expected));
    }
  }

  TEST_CASE("transport on rectangular problems matches the LP oracle")
  {
    Rng rng(5);
    for (int t = 0; t < 30; ++t)
    {
      const std::size_t n = 1 + uniform_below(rng, 6), m = 1 + uniform_below(rng, 6);
      std::vector<double> a(n), b(m), cost(n * m);
      for (auto& v : a) v = synth::uniform(rng, 0, 1);
      for (auto& v : b) v = synth::uniform(rng, 0, 1);
      for (auto& v : cost) v = synth::uniform(rng, 0, 10);
      const double sa = std::accumulate(a.begin(), a.end(), 0.0), sb = std::accumulate(b.begin(), b.end(), 0.0);
      for (auto& v : a) v /= sa;
      for (auto& v : b) v /= sb;

      std::vector<std::vector<double>> A(n + m, std::vector<double>(n * m, 0.0));
      std::vector<double> rhs(n + m);
      for (std::size_t i = 0; i < n; ++i)
      {
        for (std::size_t j = 0; j < m; ++j)
        {
          A[i][i * m + j] = 1;
          A[n + j][i * m + j] = 1;
        }
        rhs[i] = a[i];
      }
      for (std::size_t j = 0; j < m; ++j) rhs[n + j] = b[j];
      const double expected = oracle::simplex_min(A, rhs, cost);
      const Eigen::MatrixXd cm = Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>>(cost.data(), n, m);
      const auto result = solve_transport(a, b, cm, true);
      CHECK(result.cost == doctest::Approx(expected).epsilon(1e-9));
    }
  }

  TEST_CASE("emd invariants on 4x4 grids")
  {
    Rng rng(123);
    for (int t = 0; t < 100; ++t)
    {
      const auto p = random_distribution(rng, 4, 4), q = random_distribution(rng, 4, 4),
                 r = random_distribution(rng, 4, 4);
      const double pq = emd(p, q), qp = emd(q, p);
      CHECK(std::abs(pq - qp) <= 1e-9);
      CHECK(emd(p, p) <= 1e-9);
      CHECK(emd(p, r) <= pq + emd(q, r) + 1e-9);
    }
  }

  TEST_CASE("downsampling preserves mass and never upsamples")
  {
    Rng rng(6);
    const auto m = synth::random_map(rng, 37, 23);
    const auto d = downsample_area(m, 8);
    CHECK(d.rows() == 8);
    CHECK(d.cols() == 8);
    CHECK(d.sum() * (37.0 * 23.0) / 64.0 == doctest::Approx(m.sum()).epsilon(1e-9));
    const auto same = downsample_area(m, 64);
    CHECK(same.rows() == 23);
    CHECK(same.cols() == 37);
  }

  TEST_CASE("auc_judd examples")
  {
    ScalarMap p(2, 2);
    p << 0.9, 0.1, 0.2, 0.3;
    CHECK(auc_judd(p, FixationPointSet(2, 2, {{1, 0}})) == doctest::Approx(0.5));
    CHECK(auc_judd(p, FixationPointSet(2, 2, {{0, 0}})) == doctest::Approx(1.0));
    CHECK(auc_judd(ScalarMap(ScalarMap::Constant(3, 3, 0.4)), FixationPointSet(3, 3, {{1, 1}})) ==
          doctest::Approx(0.5));
    try
    {
      auc_judd(p, FixationPointSet(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
      FAIL("expected AllFixated");
    }
    catch (const Error& e)
    {
      CHECK(e.kind() == ErrorKind::AllFixated);
    }
  }

  TEST_CASE("auc_judd matches exhaustive enumeration")
  {
    Rng rng(77);
    for (int t = 0; t < 50; ++t)
    {
      const int w = 2 + static_cast<int>(uniform_below(rng, 15)), h = 2 + static_cast<int>(uniform_below(rng, 15));
      ScalarMap p = synth::random_map(rng, w, h);
      // Quantize so ties occur.
      p = (p * 6).floor() / 6;
      const auto fix = random_fixations(rng, w, h, 10);
      CHECK(std::abs(auc_judd(p, fix) - oracle::auc_judd_bruteforce(p, fix.points())) <= 1e-12);
    }
  }

  TEST_CASE("auc variants are invariant to increasing transforms")
  {
    Rng rng(31);
    for (int t = 0; t < 20; ++t)
    {
      const auto p = synth::random_map(rng, 20, 20);
      const auto fix = random_fixations(rng, 20, 20, 15);
      const ScalarMap g = (3.0 * p).exp() + 2.0;
      std::vector<Pixel> pool;
      for (int i = 0; i < 40; ++i) pool.push_back({static_cast<int>(uniform_below(rng, 20)), static_cast<int>(uniform_below(rng, 20))});
      CHECK(auc_judd(p, fix) == auc_judd(g, fix));
      CHECK(auc_borji(p, fix, 4, 10) == auc_borji(g, fix, 4, 10));
      CHECK(sauc(p, fix, pool, 4, 10) == sauc(g, fix, pool, 4, 10));
    }
  }

  TEST_CASE("auc_borji")
  {
    ScalarMap p = ScalarMap::Zero(10, 10);
    std::vector<Pixel> pts{{1, 1}, {5, 5}, {7, 2}};
    for (const auto& q : pts) p(q.y, q.x) = 1.0;
    const FixationPointSet fix(10, 10, pts);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) CHECK(auc_borji(p, fix, seed) == 1.0);
    Rng noise_rng(4);
    const auto n1 = synth::random_map(noise_rng, 10, 10);
    CHECK(auc_borji(n1, fix, 7) == auc_borji(n1, fix, 7));

    // Chance level on i.i.d. noise.
    Rng rng(2024);
    double chance = 0.0;
    for (int s = 0; s < 20; ++s)
    {
      const auto noise = synth::random_map(rng, 40, 25);
      std::vector<Pixel> f;
      std::vector<std::uint64_t> order(1000);
      std::iota(order.begin(), order.end(), 0);
      partial_shuffle(order, 50, rng);
      for (int k = 0; k < 50; ++k) f.push_back({static_cast<int>(order[k] % 40), static_cast<int>(order[k] / 40)});
      chance += auc_borji(noise, FixationPointSet(40, 25, f), s);
    }
    CHECK(std::abs(chance / 20 - 0.5) <= 0.05);

    try
    {
      auc_borji(ScalarMap(ScalarMap::Zero(2, 2)), FixationPointSet(2, 2, {{0, 0}, {1, 1}, {0, 1}}), 1);
      FAIL("expected InsufficientNegatives");
    }
    catch (const Error& e)
    {
      CHECK(e.kind() == ErrorKind::InsufficientNegatives);
    }
  }

  TEST_CASE("sauc")
  {
    ScalarMap p = ScalarMap::Zero(10, 10);
    std::vector<Pixel> own{{1, 1}, {5, 5}};
    for (const auto& q : own) p(q.y, q.x) = 1.0;
    const FixationPointSet fix(10, 10, own);
    std::vector<Pixel> pool{{2, 2}, {3, 3}, {4, 4}, {5, 5}};
    CHECK(sauc(p, fix, pool, 1) == 1.0);
    CHECK(sauc(p, fix, pool, 9) == sauc(p, fix, pool, 9));
    try
    {
      sauc(p, fix, std::vector<Pixel>{{1, 1}}, 1);
      FAIL("expected EmptyNegativePool");
    }
    catch (const Error& e)
    {
      CHECK(e.kind() == ErrorKind::EmptyNegativePool);
    }
  }

  TEST_CASE("sauc penalizes center bias")
  {
    // A broad central blob with center-biased fixations and a center-biased pool.
    const int w = 40, h = 40;
    ScalarMap p(h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) p(y, x) = std::exp(-((x - 20.0) * (x - 20.0) + (y - 20.0) * (y - 20.0)) / 200.0);
    Rng rng(3);
    auto central = [&](int n) {
      std::vector<Pixel> pts;
      for (int i = 0; i < n; ++i)
      {
        pts.push_back({std::clamp(20 + static_cast<int>(synth::uniform(rng, -8, 8)), 0, w - 1),
                       std::clamp(20 + static_cast<int>(synth::uniform(rng, -8, 8)), 0, h - 1)});
      }
      return pts;
    };
    const FixationPointSet fix(w, h, central(30));
    const auto pool = central(300);
    CHECK(sauc(p, fix, pool, 5) < auc_borji(p, fix, 5));
  }

  TEST_CASE("sim, kld and emd absorb input scale")
  {
    Rng rng(12);
    for (int t = 0; t < 100; ++t)
    {
      const ScalarMap a = synth::random_map(rng, 4, 4), b = synth::random_map(rng, 4, 4);
      const double c = synth::uniform(rng, 0.1, 10), d = synth::uniform(rng, 0.1, 10);
      const auto pa = to_distribution(a), pb = to_distribution(b);
      const auto sa = to_distribution(ScalarMap(c * a)), sb = to_distribution(ScalarMap(d * b));
      CHECK(std::abs(sim(pa, pb) - sim(sa, sb)) <= 1e-12);
      CHECK(std::abs(kld(pa, pb) - kld(sa, sb)) <= 1e-9);
      CHECK(std::abs(emd(pa, pb) - emd(sa, sb)) <= 1e-9);
    }
  }

  TEST_CASE("cc and nss are affine invariant")
  {
    Rng rng(13);
    for (int t = 0; t < 100; ++t)
    {
      const auto p = synth::random_map(rng, 8, 8), q = synth::random_map(rng, 8, 8);
      const double a = synth::uniform(rng, 0.1, 10), b = synth::uniform(rng, -5, 5);
      const ScalarMap ap = a * p + b;
      const auto fix = random_fixations(rng, 8, 8, 10);
      CHECK(std::abs(cc(ap, q) - cc(p, q)) <= 1e-9);
      CHECK(std::abs(nss(ap, fix) - nss(p, fix)) <= 1e-9);
    }
  }
}

#include "camo/seg_metrics.hpp"

#include "support/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace camo;

namespace
{

// Straight-line structure measure: loops only, population statistics.
double s_measure_reference(const ScalarMap& pred, const BinaryMask& gt)
{
  const int h = static_cast<int>(gt.rows()), w = static_cast<int>(gt.cols());
  const double eps = std::numeric_limits<double>::epsilon();
  double n_fg = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) n_fg += gt(y, x);
  const double mu = n_fg / (w * h);
  if (mu == 0) return 1.0 - pred.mean();
  if (mu == 1) return pred.mean();

  auto object = [&](bool foreground) {
    double sum = 0, n = 0;
    for (int y = 0; y < h; ++y)
    {
      for (int x = 0; x < w; ++x)
      {
        if ((gt(y, x) != 0) != foreground) continue;
        sum += foreground ? pred(y, x) : 1.0 - pred(y, x);
        n += 1;
      }
    }
    const double mean = sum / n;
    double var = 0;
    for (int y = 0; y < h; ++y)
    {
      for (int x = 0; x < w; ++x)
      {
        if ((gt(y, x) != 0) != foreground) continue;
        const double v = foreground ? pred(y, x) : 1.0 - pred(y, x);
        var += (v - mean) * (v - mean);
      }
    }
    const double sd = std::sqrt(var / n);
    return 2 * mean / (mean * mean + 1 + sd + eps);
  };
  const double so = mu * object(true) + (1 - mu) * object(false);

  double sx = 0, sy = 0;
  for (int y = 0; y < h; ++y)
  {
    for (int x = 0; x < w; ++x)
    {
      sx += gt(y, x) * x;
      sy += gt(y, x) * y;
    }
  }
  // Split columns [0, X) | [X, w) and rows [0, Y) | [Y, h).
  const int X = static_cast<int>(std::round(sx / n_fg + 1.0));
  const int Y = static_cast<int>(std::round(sy / n_fg + 1.0));
  auto ssim = [&](int x0, int x1, int y0, int y1) {
    const double n = (x1 - x0) * (y1 - y0);
    double mx = 0, my = 0;
    for (int y = y0; y < y1; ++y)
    {
      for (int x = x0; x < x1; ++x)
      {
        mx += pred(y, x);
        my += gt(y, x);
      }
    }
    mx /= n;
    my /= n;
    double vx = 0, vy = 0, cxy = 0;
    for (int y = y0; y < y1; ++y)
    {
      for (int x = x0; x < x1; ++x)
      {
        vx += (pred(y, x) - mx) * (pred(y, x) - mx);
        vy += (gt(y, x) - my) * (gt(y, x) - my);
        cxy += (pred(y, x) - mx) * (gt(y, x) - my);
      }
    }
    vx /= n;
    vy /= n;
    cxy /= n;
    const double alpha = 4 * mx * my * cxy;
    const double beta = (mx * mx + my * my) * (vx + vy);
    if (alpha != 0) return alpha / (beta + eps);
    return beta == 0 ? 1.0 : 0.0;
  };
  double sr = 0;
  const int bx[3] = {0, X, w}, by[3] = {0, Y, h};
  for (int j = 0; j < 2; ++j)
  {
    for (int i = 0; i < 2; ++i)
    {
      const int area = (bx[i + 1] - bx[i]) * (by[j + 1] - by[j]);
      if (area == 0) continue;
      sr += static_cast<double>(area) / (w * h) * ssim(bx[i], bx[i + 1], by[j], by[j + 1]);
    }
  }
  // Negative combined scores read as 0, as in the reference implementation.
  return std::max(0.0, 0.5 * so + 0.5 * sr);
}

// Pixel-by-pixel enhanced alignment on a binarized prediction.
double e_measure_reference(const BinaryMask& bin, const BinaryMask& gt)
{
  const double n = static_cast<double>(gt.size());
  double mg = 0, mp = 0;
  for (Eigen::Index i = 0; i < gt.size(); ++i)
  {
    mg += gt.data()[i];
    mp += bin.data()[i];
  }
  mg /= n;
  mp /= n;
  if (mg == 0) return 1 - mp;
  if (mg == 1) return mp;
  double total = 0;
  for (Eigen::Index i = 0; i < gt.size(); ++i)
  {
    const double g = gt.data()[i] - mg, p = bin.data()[i] - mp;
    const double xi = 2 * g * p / (g * g + p * p + 1e-12);
    total += (xi + 1) * (xi + 1) / 4;
  }
  return total / n;
}

BinaryMask mixed_4x4()
{
  BinaryMask gt(4, 4);
  gt << 0, 0, 0, 0,  //
    0, 1, 1, 0,      //
    0, 1, 1, 1,      //
    0, 0, 1, 0;
  return gt;
}

}  // namespace

TEST_SUITE("seg_metrics")
{
  TEST_CASE("mae")
  {
    const auto gt = mixed_4x4();
    CHECK(mae(gt.cast<double>(), gt) == 0.0);
    CHECK(mae(ScalarMap(ScalarMap::Ones(3, 3)), BinaryMask(BinaryMask::Zero(3, 3))) == 1.0);
    ScalarMap p(2, 2);
    p << 1, 0, 0, 1;
    CHECK(mae(p, BinaryMask(BinaryMask::Zero(2, 2))) == 0.5);
    CHECK_THROWS_AS(mae(p, gt), Error);
  }

  TEST_CASE("mae complement symmetry")
  {
    Rng rng(11);
    for (int t = 0; t < 20; ++t)
    {
      const auto p = synth::random_map(rng, 9, 7);
      const auto g = synth::random_blob(rng, 9, 7);
      const BinaryMask inv = (g == 0).cast<std::uint8_t>();
      CHECK(std::abs(mae(p, g) - mae(ScalarMap(1.0 - p), inv)) <= 1e-12);
    }
  }

  TEST_CASE("f_measure")
  {
    const auto gt = mixed_4x4();
    CHECK(f_measure(gt.cast<double>(), gt) == doctest::Approx(1.0));
    CHECK(f_measure(ScalarMap(ScalarMap::Zero(4, 4)), gt) == 0.0);
    BinaryMask g = BinaryMask::Zero(4, 4);
    g(0, 0) = g(0, 1) = g(1, 0) = g(1, 1) = 1;
    ScalarMap p = ScalarMap::Zero(4, 4);
    p(0, 0) = p(0, 1) = 1.0;
    CHECK(f_measure(p, g) == doctest::Approx(0.8125).epsilon(1e-12));
    try
    {
      f_measure(p, BinaryMask(BinaryMask::Zero(4, 4)));
      FAIL("expected EmptyGroundTruth");
    }
    catch (const Error& e)
    {
      CHECK(e.kind() == ErrorKind::EmptyGroundTruth);
    }
  }

  TEST_CASE("s_measure")
  {
    const auto gt = mixed_4x4();
    CHECK(std::abs(s_measure(gt.cast<double>(), gt) - 1.0) <= 1e-6);
    CHECK(s_measure(ScalarMap(ScalarMap::Zero(4, 4)), BinaryMask(BinaryMask::Zero(4, 4))) == 1.0);
    CHECK(s_measure(ScalarMap(ScalarMap::Constant(4, 4, 0.3)), BinaryMask(BinaryMask::Ones(4, 4))) ==
          doctest::Approx(0.3));
    const ScalarMap inverse = 1.0 - gt.cast<double>();
    CHECK(s_measure(inverse, gt) == doctest::Approx(s_measure_reference(inverse, gt)).epsilon(1e-12));
    CHECK(s_measure(inverse, gt) == 0.0);
  }

  TEST_CASE("s_measure matches the reference on random inputs")
  {
    Rng rng(21);
    for (int t = 0; t < 30; ++t)
    {
      const int w = 5 + static_cast<int>(uniform_below(rng, 20)), h = 5 + static_cast<int>(uniform_below(rng, 20));
      const auto gt = synth::random_blob(rng, w, h);
      if (count_nonzero(gt) == 0 || count_nonzero(gt) == gt.size()) continue;
      const auto p = synth::random_map(rng, w, h);
      const double s = s_measure(p, gt);
      CHECK(s == doctest::Approx(s_measure_reference(p, gt)).epsilon(1e-10));
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      CHECK(std::abs(s_measure(gt.cast<double>(), gt) - 1.0) <= 1e-6);
    }
  }

  TEST_CASE("e_measure")
  {
    const auto gt = mixed_4x4();
    CHECK(e_measure(gt.cast<double>(), gt) == doctest::Approx(1.0));
    CHECK(e_measure(ScalarMap(ScalarMap::Ones(4, 4)), BinaryMask(BinaryMask::Ones(4, 4))) == 1.0);
    const ScalarMap inverse = 1.0 - gt.cast<double>();
    CHECK(e_measure(inverse, gt) ==
          doctest::Approx(e_measure_reference(binarize_adaptive(inverse), gt)).epsilon(1e-12));
  }

  TEST_CASE("f and e are invariant to threshold-preserving remaps")
  {
    Rng rng(4);
    for (int t = 0; t < 20; ++t)
    {
      const auto gt = synth::random_blob(rng, 16, 12);
      if (count_nonzero(gt) == 0) continue;
      const ScalarMap p = 0.5 * gt.cast<double>() + 0.1 * synth::random_map(rng, 16, 12);
      const BinaryMask bin = binarize_adaptive(p);
      // Any other map with the same binarization scores identically.
      const ScalarMap q = bin.cast<double>();
      REQUIRE((binarize_adaptive(q) == bin).all());
      CHECK(f_measure(p, gt) == f_measure(q, gt));
      CHECK(e_measure(p, gt) == e_measure(q, gt));
      for (double v : {f_measure(p, gt), e_measure(p, gt), s_measure(p, gt), mae(p, gt)})
      {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

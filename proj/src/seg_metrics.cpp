#include "camo/seg_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace camo
{
namespace
{

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Moments
{
  double mean = 0.0;
  double sd = 0.0;
};

template <typename Derived>
Moments moments_where(const Eigen::ArrayBase<Derived>& values, const BinaryMask& where)
{
  const long n = count_nonzero(where);
  if (n == 0) return {};
  const auto w = where.cast<double>();
  const double mean = (values * w).sum() / n;
  const double var = ((values - mean).square() * w).sum() / n;
  return {mean, std::sqrt(var)};
}

// Similarity of the values on a region against the ideal response 1.
double object_score(const ScalarMap& values, const BinaryMask& region)
{
  const auto m = moments_where(values, region);
  return 2.0 * m.mean / (m.mean * m.mean + 1.0 + m.sd + kEps);
}

double object_aware(const ScalarMap& pred, const BinaryMask& gt)
{
  const double mu = gt.cast<double>().mean();
  const BinaryMask bg = (gt == 0).cast<std::uint8_t>();
  const ScalarMap fg_pred = pred * gt.cast<double>();
  const ScalarMap bg_pred = (1.0 - pred) * bg.cast<double>();
  return mu * object_score(fg_pred, gt) + (1.0 - mu) * object_score(bg_pred, bg);
}

template <typename A, typename B>
double block_ssim(const Eigen::ArrayBase<A>& pred, const Eigen::ArrayBase<B>& gt)
{
  const double n = static_cast<double>(pred.size());
  const double x = pred.mean();
  const double y = gt.mean();
  const double sx2 = (pred - x).square().sum() / n;
  const double sy2 = (gt - y).square().sum() / n;
  const double sxy = ((pred - x) * (gt - y)).sum() / n;
  const double alpha = 4.0 * x * y * sxy;
  const double beta = (x * x + y * y) * (sx2 + sy2);
  if (alpha != 0.0) return alpha / (beta + kEps);
  return beta == 0.0 ? 1.0 : 0.0;
}

double region_aware(const ScalarMap& pred, const BinaryMask& gt)
{
  const Eigen::Index h = gt.rows(), w = gt.cols();
  const ScalarMap g = gt.cast<double>();
  const double total = g.sum();
  Eigen::Index cx = w / 2, cy = h / 2;
  if (total > 0)
  {
    double sx = 0.0, sy = 0.0;
    for (Eigen::Index y = 0; y < h; ++y)
    {
      for (Eigen::Index x = 0; x < w; ++x)
      {
        sx += g(y, x) * static_cast<double>(x);
        sy += g(y, x) * static_cast<double>(y);
      }
    }
    cx = static_cast<Eigen::Index>(std::lround(sx / total)) + 1;
    cy = static_cast<Eigen::Index>(std::lround(sy / total)) + 1;
  }
  cx = std::clamp<Eigen::Index>(cx, 0, w);
  cy = std::clamp<Eigen::Index>(cy, 0, h);

  const double area = static_cast<double>(w * h);
  double score = 0.0;
  const Eigen::Index xs[] = {0, cx, 0, cx};
  const Eigen::Index ys[] = {0, 0, cy, cy};
  const Eigen::Index ws[] = {cx, w - cx, cx, w - cx};
  const Eigen::Index hs[] = {cy, cy, h - cy, h - cy};
  for (int b = 0; b < 4; ++b)
  {
    if (ws[b] == 0 || hs[b] == 0) continue;
    const double weight = static_cast<double>(ws[b] * hs[b]) / area;
    score += weight * block_ssim(pred.block(ys[b], xs[b], hs[b], ws[b]), g.block(ys[b], xs[b], hs[b], ws[b]));
  }
  return score;
}

}  // namespace

double f_measure(const ScalarMap& pred, const BinaryMask& gt)
{
  require_same_dims(pred, gt);
  const long positives = count_nonzero(gt);
  if (positives == 0) throw Error(ErrorKind::EmptyGroundTruth, "F-measure needs a nonempty ground truth");
  const BinaryMask bin = binarize_adaptive(pred);
  const long predicted = count_nonzero(bin);
  const long tp = ((bin != 0) && (gt != 0)).count();
  const double precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
  const double recall = static_cast<double>(tp) / positives;
  if (precision + recall == 0.0) return 0.0;
  return (1.0 + kFBetaSquared) * precision * recall / (kFBetaSquared * precision + recall);
}

double s_measure(const ScalarMap& pred, const BinaryMask& gt)
{
  require_same_dims(pred, gt);
  const double mu = gt.cast<double>().mean();
  if (mu == 0.0) return 1.0 - pred.mean();
  if (mu == 1.0) return pred.mean();
  const double s = kSMeasureAlpha * object_aware(pred, gt) + (1.0 - kSMeasureAlpha) * region_aware(pred, gt);
  return std::clamp(s, 0.0, 1.0);
}

double e_measure(const ScalarMap& pred, const BinaryMask& gt)
{
  require_same_dims(pred, gt);
  const ScalarMap fm = binarize_adaptive(pred).cast<double>();
  const ScalarMap g = gt.cast<double>();
  const double mu = g.mean();
  if (mu == 0.0) return 1.0 - fm.mean();
  if (mu == 1.0) return fm.mean();
  const ScalarMap phi_p = fm - fm.mean();
  const ScalarMap phi_g = g - mu;
  const ScalarMap align = 2.0 * phi_g * phi_p / (phi_g.square() + phi_p.square() + 1e-12);
  return ((align + 1.0).square() / 4.0).mean();
}

}  // namespace camo

#include "camo/fixation_metrics.hpp"

#include "camo/random.hpp"
#include "camo/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace camo
{
namespace
{

void require_distribution(const ScalarMap& m, const char* name)
{
  if (!is_distribution(m)) throw Error(ErrorKind::NotNormalized, std::string(name) + " is not a distribution");
}

// Row c of the result holds the overlap of source pixel [i, i+1) with target
// cell [c * n / cells, (c + 1) * n / cells), measured in source pixels.
Eigen::MatrixXd area_weights(Eigen::Index n, Eigen::Index cells)
{
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(cells, n);
  const double step = static_cast<double>(n) / static_cast<double>(cells);
  for (Eigen::Index c = 0; c < cells; ++c)
  {
    const double lo = c * step, hi = (c + 1) * step;
    const auto first = static_cast<Eigen::Index>(std::floor(lo));
    const auto last = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(std::ceil(hi)) - 1);
    for (Eigen::Index i = first; i <= last; ++i)
    {
      const double overlap = std::min(hi, static_cast<double>(i + 1)) - std::max(lo, static_cast<double>(i));
      if (overlap > 0) w(c, i) = overlap;
    }
  }
  return w;
}

std::vector<double> values_at(const ScalarMap& pred, std::span<const Pixel> points)
{
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(pred(p.y, p.x));
  return out;
}

void require_fixations(const ScalarMap& pred, const FixationPointSet& fixations)
{
  if (fixations.empty()) throw Error(ErrorKind::EmptyFixations, "no fixation points");
  if (fixations.width() != pred.cols() || fixations.height() != pred.rows())
  {
    throw Error(ErrorKind::DimensionMismatch, "fixation set and prediction differ in size");
  }
}

std::vector<double> non_fixated_values(const ScalarMap& pred, const FixationPointSet& fixations)
{
  Image<std::uint8_t> fixated = Image<std::uint8_t>::Zero(pred.rows(), pred.cols());
  for (const auto& p : fixations.points()) fixated(p.y, p.x) = 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(pred.size()) - fixations.size());
  for (Eigen::Index i = 0; i < pred.size(); ++i)
  {
    if (!fixated.data()[i]) out.push_back(pred.data()[i]);
  }
  return out;
}

}  // namespace

double sim(const ScalarMap& p, const ScalarMap& q)
{
  require_same_dims(p, q);
  require_distribution(p, "sim: p");
  require_distribution(q, "sim: q");
  return p.min(q).sum();
}

double cc(const ScalarMap& p, const ScalarMap& q)
{
  require_same_dims(p, q);
  if (p.maxCoeff() == p.minCoeff() || q.maxCoeff() == q.minCoeff())
  {
    throw Error(ErrorKind::DegenerateMap, "cc of a constant map");
  }
  const ScalarMap a = p - p.mean();
  const ScalarMap b = q - q.mean();
  const double saa = a.square().sum(), sbb = b.square().sum();
  if (!(saa > 0) || !(sbb > 0)) throw Error(ErrorKind::DegenerateMap, "cc of a constant map");
  return std::clamp((a * b).sum() / std::sqrt(saa * sbb), -1.0, 1.0);
}

double nss(const ScalarMap& pred, const FixationPointSet& fixations)
{
  require_fixations(pred, fixations);
  const ScalarMap z = z_score(pred);
  double total = 0.0;
  for (const auto& p : fixations.points()) total += z(p.y, p.x);
  return total / static_cast<double>(fixations.size());
}

double kld(const ScalarMap& p, const ScalarMap& q, double eps)
{
  require_same_dims(p, q);
  require_distribution(p, "kld: p");
  require_distribution(q, "kld: q");
  return (q * (eps + q / (p + eps)).log()).sum();
}

ScalarMap downsample_area(const ScalarMap& map, int grid)
{
  if (grid < 1) throw Error(ErrorKind::InvalidConfig, "EMD grid must be >= 1");
  const Eigen::Index gh = std::min<Eigen::Index>(grid, map.rows());
  const Eigen::Index gw = std::min<Eigen::Index>(grid, map.cols());
  if (gh == map.rows() && gw == map.cols()) return map;
  const Eigen::MatrixXd rows = area_weights(map.rows(), gh);
  const Eigen::MatrixXd cols = area_weights(map.cols(), gw);
  const Eigen::MatrixXd cell = rows * map.matrix() * cols.transpose();
  const double cell_area = (static_cast<double>(map.rows()) / gh) * (static_cast<double>(map.cols()) / gw);
  return cell.array() / cell_area;
}

double emd(const ScalarMap& p, const ScalarMap& q, int grid)
{
  require_same_dims(p, q);
  const ScalarMap a = to_distribution(downsample_area(p, grid));
  const ScalarMap b = to_distribution(downsample_area(q, grid));

  // Mass shared by both maps stays in place at zero cost (the ground
  // distance is a metric), so only the excess of each side is transported.
  const ScalarMap common = a.min(b);
  const ScalarMap excess_a = a - common;
  const ScalarMap excess_b = b - common;

  std::vector<double> supply, demand;
  std::vector<Pixel> supply_at, demand_at;
  for (Eigen::Index y = 0; y < a.rows(); ++y)
  {
    for (Eigen::Index x = 0; x < a.cols(); ++x)
    {
      if (excess_a(y, x) > 0)
      {
        supply.push_back(excess_a(y, x));
        supply_at.push_back({static_cast<int>(x), static_cast<int>(y)});
      }
      if (excess_b(y, x) > 0)
      {
        demand.push_back(excess_b(y, x));
        demand_at.push_back({static_cast<int>(x), static_cast<int>(y)});
      }
    }
  }
  if (supply.empty() || demand.empty()) return 0.0;
  double st = 0.0, dt = 0.0;
  for (double v : supply) st += v;
  for (double v : demand) dt += v;
  for (double& v : demand) v *= st / dt;

  Eigen::MatrixXd cost(supply.size(), demand.size());
  for (std::size_t i = 0; i < supply.size(); ++i)
  {
    for (std::size_t j = 0; j < demand.size(); ++j)
    {
      const double dx = supply_at[i].x - demand_at[j].x;
      const double dy = supply_at[i].y - demand_at[j].y;
      cost(i, j) = std::sqrt(dx * dx + dy * dy);
    }
  }
  return std::max(0.0, solve_transport(supply, demand, cost).cost);
}

double roc_area(std::span<const double> positives, std::span<const double> negatives)
{
  if (positives.empty()) throw Error(ErrorKind::EmptyFixations, "no positive samples");
  if (negatives.empty()) throw Error(ErrorKind::AllFixated, "no negative samples");
  std::vector<double> pos(positives.begin(), positives.end());
  std::vector<double> neg(negatives.begin(), negatives.end());
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  const double np = static_cast<double>(pos.size()), nn = static_cast<double>(neg.size());

  double area = 0.0, px = 0.0, py = 0.0;
  std::size_t ip = 0, in = 0;
  while (ip < pos.size())
  {
    const double t = pos[ip];
    while (ip < pos.size() && pos[ip] >= t) ++ip;
    while (in < neg.size() && neg[in] >= t) ++in;
    const double x = in / nn, y = ip / np;
    area += (x - px) * (y + py) / 2.0;
    px = x;
    py = y;
  }
  area += (1.0 - px) * (1.0 + py) / 2.0;
  return area;
}

double auc_judd(const ScalarMap& pred, const FixationPointSet& fixations)
{
  require_fixations(pred, fixations);
  const auto pos = values_at(pred, fixations.points());
  const auto neg = non_fixated_values(pred, fixations);
  if (neg.empty()) throw Error(ErrorKind::AllFixated, "every pixel is fixated");
  return roc_area(pos, neg);
}

double auc_borji(const ScalarMap& pred, const FixationPointSet& fixations, std::uint64_t seed, int splits)
{
  require_fixations(pred, fixations);
  if (splits < 1) throw Error(ErrorKind::InvalidConfig, "splits must be >= 1");
  const auto pos = values_at(pred, fixations.points());
  auto neg_pool = non_fixated_values(pred, fixations);
  const std::size_t k = pos.size();
  if (neg_pool.size() < k)
  {
    throw Error(ErrorKind::InsufficientNegatives, std::to_string(neg_pool.size()) + " negatives for " +
                                                    std::to_string(k) + " fixations");
  }
  Rng rng(seed);
  double total = 0.0;
  for (int s = 0; s < splits; ++s)
  {
    partial_shuffle(neg_pool, k, rng);
    total += roc_area(pos, std::span<const double>(neg_pool.data(), k));
  }
  return total / splits;
}

double sauc(const ScalarMap& pred, const FixationPointSet& fixations, std::span<const Pixel> other_fixations,
            std::uint64_t seed, int splits)
{
  require_fixations(pred, fixations);
  if (splits < 1) throw Error(ErrorKind::InvalidConfig, "splits must be >= 1");
  std::vector<Pixel> pool;
  for (const auto& p : other_fixations)
  {
    if (p.x < 0 || p.y < 0 || p.x >= pred.cols() || p.y >= pred.rows()) continue;
    if (!fixations.contains(p)) pool.push_back(p);
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (pool.empty()) throw Error(ErrorKind::EmptyNegativePool, "no negatives from other images");

  const auto pos = values_at(pred, fixations.points());
  auto neg_pool = values_at(pred, pool);
  const std::size_t k = std::min(pos.size(), neg_pool.size());
  Rng rng(seed);
  double total = 0.0;
  for (int s = 0; s < splits; ++s)
  {
    partial_shuffle(neg_pool, k, rng);
    total += roc_area(pos, std::span<const double>(neg_pool.data(), k));
  }
  return total / splits;
}

FixationPointSet fixations_from_mask(const BinaryMask& points)
{
  std::vector<Pixel> out;
  for (Eigen::Index y = 0; y < points.rows(); ++y)
    for (Eigen::Index x = 0; x < points.cols(); ++x)
      if (points(y, x)) out.push_back({static_cast<int>(x), static_cast<int>(y)});
  return FixationPointSet(static_cast<int>(points.cols()), static_cast<int>(points.rows()), std::move(out));
}

}  // namespace camo

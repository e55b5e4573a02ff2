#pragma once

// Test-side reference implementations. None of these call into the library's
// metric code; they are deliberately naive.

#include "camo/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle
{

/// Dense two-phase simplex (Bland's rule) for
///   min c.x  s.t.  A x = b, x >= 0,  b >= 0.
/// Returns the optimal objective.
inline double simplex_min(std::vector<std::vector<double>> A, std::vector<double> b, const std::vector<double>& c)
{
  const std::size_t m = A.size(), n = c.size();
  const double eps = 1e-12;
  for (std::size_t i = 0; i < m; ++i)
  {
    if (b[i] < 0)
    {
      for (auto& v : A[i]) v = -v;
      b[i] = -b[i];
    }
  }
  // Tableau columns: n structural, m artificial, then rhs.
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i)
  {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1.0;
    T[i][cols - 1] = b[i];
    basis[i] = n + i;
  }

  auto pivot = [&](std::size_t r, std::size_t col) {
    const double p = T[r][col];
    for (auto& v : T[r]) v /= p;
    for (std::size_t i = 0; i <= m; ++i)
    {
      if (i == r || T[i][col] == 0.0) continue;
      const double f = T[i][col];
      for (std::size_t j = 0; j < cols; ++j) T[i][j] -= f * T[r][j];
    }
    basis[r] = col;
  };

  // Runs simplex on objective row m over columns [0, limit).
  auto run = [&](std::size_t limit) {
    while (true)
    {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j)
      {
        if (T[m][j] < -eps)
        {
          enter = j;
          break;
        }
      }
      if (enter == limit) return;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i)
      {
        if (T[i][enter] > eps)
        {
          const double ratio = T[i][cols - 1] / T[i][enter];
          if (ratio < best - eps || (std::abs(ratio - best) <= eps && basis[i] < basis[leave]))
          {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) throw std::runtime_error("oracle LP unbounded");
      pivot(leave, enter);
    }
  };

  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j < cols; ++j)
  {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += T[i][j];
    T[m][j] = (j >= n && j < n + m) ? 0.0 : -s;
  }
  run(n + m);
  if (std::abs(T[m][cols - 1]) > 1e-9) throw std::runtime_error("oracle LP infeasible");

  // Drive artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i)
  {
    if (basis[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j)
    {
      if (std::abs(T[i][j]) > 1e-9)
      {
        pivot(i, j);
        break;
      }
    }
  }

  // Phase 2 objective (artificial columns excluded from entering).
  for (std::size_t j = 0; j < cols; ++j) T[m][j] = j < n ? c[j] : 0.0;
  for (std::size_t i = 0; i < m; ++i)
  {
    const std::size_t bj = basis[i];
    if (bj >= n) continue;
    const double f = T[m][bj];
    if (f == 0.0) continue;
    for (std::size_t j = 0; j < cols; ++j) T[m][j] -= f * T[i][j];
  }
  run(n);
  return -T[m][cols - 1];
}

/// Exact EMD between two row-major h x w distributions, cell-center Euclidean ground distance.
inline double emd_lp(const camo::ScalarMap& p, const camo::ScalarMap& q)
{
  const auto h = p.rows(), w = p.cols();
  const std::size_t k = static_cast<std::size_t>(h * w);
  std::vector<double> c(k * k);
  for (std::size_t a = 0; a < k; ++a)
  {
    for (std::size_t b = 0; b < k; ++b)
    {
      const double dx = static_cast<double>(a % w) - static_cast<double>(b % w);
      const double dy = static_cast<double>(a / w) - static_cast<double>(b / w);
      c[a * k + b] = std::sqrt(dx * dx + dy * dy);
    }
  }
  std::vector<std::vector<double>> A(2 * k, std::vector<double>(k * k, 0.0));
  std::vector<double> rhs(2 * k);
  for (std::size_t a = 0; a < k; ++a)
  {
    for (std::size_t b = 0; b < k; ++b)
    {
      A[a][a * k + b] = 1.0;
      A[k + b][a * k + b] = 1.0;
    }
    rhs[a] = p(a / w, a % w);
    rhs[k + a] = q(a / w, a % w);
  }
  return simplex_min(A, rhs, c);
}

/// ROC area by brute force: one threshold per fixated value, counts taken by
/// scanning every pixel.
inline double auc_judd_bruteforce(const camo::ScalarMap& pred, const std::vector<camo::Pixel>& fix)
{
  auto fixated = [&](Eigen::Index y, Eigen::Index x) {
    for (const auto& f : fix)
    {
      if (f.x == x && f.y == y) return true;
    }
    return false;
  };
  std::vector<double> thresholds;
  for (const auto& f : fix) thresholds.push_back(pred(f.y, f.x));
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  double n_pos = 0, n_neg = 0;
  for (Eigen::Index y = 0; y < pred.rows(); ++y)
    for (Eigen::Index x = 0; x < pred.cols(); ++x) (fixated(y, x) ? n_pos : n_neg) += 1;

  std::vector<std::pair<double, double>> curve{{0.0, 0.0}};
  for (double t : thresholds)
  {
    double tp = 0, fp = 0;
    for (Eigen::Index y = 0; y < pred.rows(); ++y)
    {
      for (Eigen::Index x = 0; x < pred.cols(); ++x)
      {
        if (pred(y, x) >= t) (fixated(y, x) ? tp : fp) += 1;
      }
    }
    curve.emplace_back(fp / n_neg, tp / n_pos);
  }
  curve.emplace_back(1.0, 1.0);
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
  {
    area += (curve[i].first - curve[i - 1].first) * (curve[i].second + curve[i - 1].second) / 2.0;
  }
  return area;
}

inline double spearman_closed_form(const std::vector<double>& a, const std::vector<double>& b)
{
  const std::size_t n = a.size();
  auto rank_of = [n](const std::vector<double>& v, std::size_t i) {
    double r = 1;
    for (std::size_t j = 0; j < n; ++j) r += v[j] < v[i] ? 1 : 0;
    return r;
  };
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    const double d = rank_of(a, i) - rank_of(b, i);
    d2 += d * d;
  }
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
}

/// Average-tie ranks by counting, then a textbook Pearson.
inline double spearman_rank_then_pearson(const std::vector<double>& a, const std::vector<double>& b)
{
  const std::size_t n = a.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      double less = 0, equal = 0;
      for (std::size_t j = 0; j < n; ++j)
      {
        less += v[j] < v[i] ? 1 : 0;
        equal += v[j] == v[i] ? 1 : 0;
      }
      r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i)
  {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

struct Moments
{
  double mean = 0.0;
  double variance = 0.0;
  std::size_t count = 0;
};

/// Mean and variance of the quintuple Spearman over every admissible choice of
/// one pair per rank. pairs[r] holds the predicted codes of gt rank r+1.
inline Moments corr_enumeration(const std::vector<std::vector<int>>& pairs)
{
  std::vector<double> values;
  std::vector<std::size_t> idx(5, 0);
  while (true)
  {
    std::vector<double> gt{1, 2, 3, 4, 5}, pred(5);
    for (int r = 0; r < 5; ++r) pred[r] = pairs[r][idx[r]];
    const bool constant = std::all_of(pred.begin(), pred.end(), [&](double v) { return v == pred[0]; });
    values.push_back(constant ? 0.0 : spearman_rank_then_pearson(gt, pred));
    int r = 4;
    while (r >= 0 && ++idx[r] == pairs[r].size()) idx[r--] = 0;
    if (r < 0) break;
  }
  Moments m;
  m.count = values.size();
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(m.count);
  for (double v : values) m.variance += (v - m.mean) * (v - m.mean);
  m.variance /= static_cast<double>(m.count);
  return m;
}

}  // namespace oracle

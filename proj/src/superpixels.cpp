#include "camo/superpixels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace camo
{
namespace
{

double srgb_to_linear(double c)
{
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t)
{
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// Circular neighbour order for LBP(8,1), counter-clockwise from the right.
constexpr std::array<std::array<int, 2>, 8> kLbpOffsets = {
  {{1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}}};

std::array<int, 256> make_uniform_table()
{
  std::array<int, 256> table{};
  int next = 0;
  for (int c = 0; c < 256; ++c)
  {
    int transitions = 0;
    for (int b = 0; b < 8; ++b)
    {
      const int cur = (c >> b) & 1;
      const int nxt = (c >> ((b + 1) % 8)) & 1;
      transitions += cur != nxt;
    }
    table[c] = transitions <= 2 ? next++ : kLbpBins - 1;
  }
  return table;
}

const std::array<int, 256>& uniform_table()
{
  static const std::array<int, 256> table = make_uniform_table();
  return table;
}

int histogram_bin(double v, double lo, double hi, int bins)
{
  const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
  return std::clamp(b, 0, bins - 1);
}

}  // namespace

LabImage to_lab(const RgbImage& image)
{
  LabImage lab{ScalarMap(image.height, image.width), ScalarMap(image.height, image.width),
               ScalarMap(image.height, image.width)};
  for (int y = 0; y < image.height; ++y)
  {
    for (int x = 0; x < image.width; ++x)
    {
      const double r = srgb_to_linear(image.at(x, y, 0) / 255.0);
      const double g = srgb_to_linear(image.at(x, y, 1) / 255.0);
      const double b = srgb_to_linear(image.at(x, y, 2) / 255.0);
      const double X = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
      const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
      const double Z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
      const double fx = lab_f(X), fy = lab_f(Y), fz = lab_f(Z);
      lab.l(y, x) = 116.0 * fy - 16.0;
      lab.a(y, x) = 500.0 * (fx - fy);
      lab.b(y, x) = 200.0 * (fy - fz);
    }
  }
  return lab;
}

ScalarMap luminance(const RgbImage& image)
{
  ScalarMap out(image.height, image.width);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x)
      out(y, x) = (0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) + 0.114 * image.at(x, y, 2)) / 255.0;
  return out;
}

Segmentation slic_superpixels(const RgbImage& image, const SlicConfig& config)
{
  const int w = image.width, h = image.height;
  const long n = static_cast<long>(w) * h;
  if (config.superpixels < 1) throw Error(ErrorKind::InvalidConfig, "SLIC needs K >= 1");
  if (config.superpixels > n)
  {
    throw Error(ErrorKind::TooManySuperpixels,
                std::to_string(config.superpixels) + " superpixels for " + std::to_string(n) + " pixels");
  }
  const LabImage lab = to_lab(image);

  const double step = std::sqrt(static_cast<double>(n) / config.superpixels);
  const int nx = std::clamp(static_cast<int>(std::lround(w / step)), 1, w);
  const int ny = std::clamp(static_cast<int>(std::lround(h / step)), 1, h);
  const double cell_w = static_cast<double>(w) / nx, cell_h = static_cast<double>(h) / ny;
  const double spatial = std::sqrt(cell_w * cell_h);
  const int window = static_cast<int>(std::ceil(std::max(cell_w, cell_h)));

  auto gradient = [&](int x, int y) {
    const int x0 = std::max(0, x - 1), x1 = std::min(w - 1, x + 1);
    const int y0 = std::max(0, y - 1), y1 = std::min(h - 1, y + 1);
    auto d2 = [&](int ax, int ay, int bx, int by) {
      const double dl = lab.l(ay, ax) - lab.l(by, bx);
      const double da = lab.a(ay, ax) - lab.a(by, bx);
      const double db = lab.b(ay, ax) - lab.b(by, bx);
      return dl * dl + da * da + db * db;
    };
    return d2(x1, y, x0, y) + d2(x, y1, x, y0);
  };

  struct Center
  {
    double l, a, b, x, y;
  };
  std::vector<Center> centers;
  for (int j = 0; j < ny; ++j)
  {
    for (int i = 0; i < nx; ++i)
    {
      int cx = std::min(w - 1, static_cast<int>((i + 0.5) * cell_w));
      int cy = std::min(h - 1, static_cast<int>((j + 0.5) * cell_h));
      double best = gradient(cx, cy);
      int bx = cx, by = cy;
      for (int dy = -1; dy <= 1; ++dy)
      {
        for (int dx = -1; dx <= 1; ++dx)
        {
          const int xx = cx + dx, yy = cy + dy;
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
          const double g = gradient(xx, yy);
          if (g < best)
          {
            best = g;
            bx = xx;
            by = yy;
          }
        }
      }
      centers.push_back({lab.l(by, bx), lab.a(by, bx), lab.b(by, bx), static_cast<double>(bx),
                         static_cast<double>(by)});
    }
  }

  const double m2 = config.compactness * config.compactness;
  const double s2 = spatial * spatial;
  Image<int> labels = Image<int>::Constant(h, w, -1);
  ScalarMap dist(h, w);
  for (int it = 0; it < std::max(1, config.iterations); ++it)
  {
    dist.setConstant(std::numeric_limits<double>::infinity());
    labels.setConstant(-1);
    for (std::size_t k = 0; k < centers.size(); ++k)
    {
      const auto& c = centers[k];
      const int x0 = std::max(0, static_cast<int>(c.x) - window), x1 = std::min(w - 1, static_cast<int>(c.x) + window);
      const int y0 = std::max(0, static_cast<int>(c.y) - window), y1 = std::min(h - 1, static_cast<int>(c.y) + window);
      for (int y = y0; y <= y1; ++y)
      {
        for (int x = x0; x <= x1; ++x)
        {
          const double dl = lab.l(y, x) - c.l, da = lab.a(y, x) - c.a, db = lab.b(y, x) - c.b;
          const double dx = x - c.x, dy = y - c.y;
          const double d = dl * dl + da * da + db * db + (dx * dx + dy * dy) / s2 * m2;
          if (d < dist(y, x))
          {
            dist(y, x) = d;
            labels(y, x) = static_cast<int>(k);
          }
        }
      }
    }
    // Pixels outside every window go to the spatially nearest center.
    for (int y = 0; y < h; ++y)
    {
      for (int x = 0; x < w; ++x)
      {
        if (labels(y, x) >= 0) continue;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < centers.size(); ++k)
        {
          const double dx = x - centers[k].x, dy = y - centers[k].y;
          if (dx * dx + dy * dy < best)
          {
            best = dx * dx + dy * dy;
            labels(y, x) = static_cast<int>(k);
          }
        }
      }
    }
    std::vector<std::array<double, 6>> acc(centers.size(), std::array<double, 6>{});
    for (int y = 0; y < h; ++y)
    {
      for (int x = 0; x < w; ++x)
      {
        auto& a = acc[labels(y, x)];
        a[0] += lab.l(y, x);
        a[1] += lab.a(y, x);
        a[2] += lab.b(y, x);
        a[3] += x;
        a[4] += y;
        a[5] += 1.0;
      }
    }
    for (std::size_t k = 0; k < centers.size(); ++k)
    {
      const auto& a = acc[k];
      if (a[5] == 0) continue;
      centers[k] = {a[0] / a[5], a[1] / a[5], a[2] / a[5], a[3] / a[5], a[4] / a[5]};
    }
  }

  // Connectivity: flood-fill components; small ones join an adjacent label.
  const long min_size = std::max<long>(1, n / static_cast<long>(centers.size()) / 4);
  Image<int> out = Image<int>::Constant(h, w, -1);
  std::vector<Pixel> component;
  int next_label = 0;
  constexpr int dxs[] = {-1, 0, 1, 0};
  constexpr int dys[] = {0, -1, 0, 1};
  for (int y = 0; y < h; ++y)
  {
    for (int x = 0; x < w; ++x)
    {
      if (out(y, x) >= 0) continue;
      int adjacent = -1;
      for (int d = 0; d < 4; ++d)
      {
        const int xx = x + dxs[d], yy = y + dys[d];
        if (xx >= 0 && yy >= 0 && xx < w && yy < h && out(yy, xx) >= 0) adjacent = out(yy, xx);
      }
      const int old = labels(y, x);
      component.clear();
      component.push_back({x, y});
      out(y, x) = next_label;
      for (std::size_t i = 0; i < component.size(); ++i)
      {
        const auto p = component[i];
        for (int d = 0; d < 4; ++d)
        {
          const int xx = p.x + dxs[d], yy = p.y + dys[d];
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
          if (out(yy, xx) >= 0 || labels(yy, xx) != old) continue;
          out(yy, xx) = next_label;
          component.push_back({xx, yy});
        }
      }
      if (static_cast<long>(component.size()) <= min_size && adjacent >= 0)
      {
        for (const auto& p : component) out(p.y, p.x) = adjacent;
      }
      else
      {
        ++next_label;
      }
    }
  }

  Segmentation seg;
  seg.labels = std::move(out);
  seg.superpixels.resize(next_label);
  for (int k = 0; k < next_label; ++k) seg.superpixels[k].id = k;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) seg.superpixels[seg.labels(y, x)].members.push_back({x, y});
  return seg;
}

Image<int> uniform_lbp(const ScalarMap& gray)
{
  const auto& table = uniform_table();
  const int h = static_cast<int>(gray.rows()), w = static_cast<int>(gray.cols());
  Image<int> out(h, w);
  for (int y = 0; y < h; ++y)
  {
    for (int x = 0; x < w; ++x)
    {
      const double c = gray(y, x);
      int pattern = 0;
      for (int p = 0; p < 8; ++p)
      {
        const int xx = std::clamp(x + kLbpOffsets[p][0], 0, w - 1);
        const int yy = std::clamp(y + kLbpOffsets[p][1], 0, h - 1);
        if (gray(yy, xx) >= c) pattern |= 1 << p;
      }
      out(y, x) = table[pattern];
    }
  }
  return out;
}

int lbp_flat_bin() { return uniform_table()[255]; }

void superpixel_features(const RgbImage& image, Segmentation& segmentation, const BinaryMask& gt, int color_bins)
{
  if (gt.rows() != image.height || gt.cols() != image.width)
  {
    throw Error(ErrorKind::DimensionMismatch, "gt mask and image differ in size");
  }
  const LabImage lab = to_lab(image);
  const Image<int> lbp = uniform_lbp(luminance(image));
  for (auto& sp : segmentation.superpixels)
  {
    sp.color_histogram.assign(3 * color_bins, 0.0);
    sp.texture_histogram.assign(kLbpBins, 0.0);
    long inside = 0;
    double sl = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& p : sp.members)
    {
      const double l = lab.l(p.y, p.x), a = lab.a(p.y, p.x), b = lab.b(p.y, p.x);
      sl += l;
      sa += a;
      sb += b;
      sp.color_histogram[histogram_bin(l, 0.0, 100.0, color_bins)] += 1.0;
      sp.color_histogram[color_bins + histogram_bin(a, -128.0, 128.0, color_bins)] += 1.0;
      sp.color_histogram[2 * color_bins + histogram_bin(b, -128.0, 128.0, color_bins)] += 1.0;
      sp.texture_histogram[lbp(p.y, p.x)] += 1.0;
      inside += gt(p.y, p.x) != 0;
    }
    const double count = static_cast<double>(sp.members.size());
    if (count == 0) continue;
    sp.mean_l = sl / count;
    sp.mean_a = sa / count;
    sp.mean_b = sb / count;
    for (auto& v : sp.color_histogram) v /= 3.0 * count;
    for (auto& v : sp.texture_histogram) v /= count;
    sp.side = 2 * inside > static_cast<long>(sp.members.size()) ? Side::Foreground : Side::Background;
  }
}

}  // namespace camo

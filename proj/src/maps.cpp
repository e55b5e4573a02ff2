#include "camo/maps.hpp"

#include <algorithm>
#include <cmath>

namespace camo
{
namespace
{

std::vector<double> gaussian_kernel(double sigma)
{
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i)
  {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    total += k[i + radius];
  }
  for (auto& v : k) v /= total;
  return k;
}

// Zero-padded separable convolution.
ScalarMap convolve_separable(const ScalarMap& in, const std::vector<double>& k)
{
  const int radius = static_cast<int>(k.size() / 2);
  const Eigen::Index h = in.rows(), w = in.cols();
  ScalarMap tmp = ScalarMap::Zero(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
  {
    for (Eigen::Index x = 0; x < w; ++x)
    {
      const double v = in(y, x);
      if (v == 0.0) continue;
      const Eigen::Index lo = std::max<Eigen::Index>(0, x - radius), hi = std::min<Eigen::Index>(w - 1, x + radius);
      for (Eigen::Index xx = lo; xx <= hi; ++xx) tmp(y, xx) += v * k[xx - x + radius];
    }
  }
  ScalarMap out = ScalarMap::Zero(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
  {
    if ((tmp.row(y) == 0.0).all()) continue;
    const Eigen::Index lo = std::max<Eigen::Index>(0, y - radius), hi = std::min<Eigen::Index>(h - 1, y + radius);
    for (Eigen::Index yy = lo; yy <= hi; ++yy) out.row(yy) += k[yy - y + radius] * tmp.row(y);
  }
  return out;
}

}  // namespace

ScalarMap gaussian_blur(const ScalarMap& map, double sigma)
{
  if (!(sigma > 0)) throw Error(ErrorKind::InvalidConfig, "sigma must be positive");
  return convolve_separable(map, gaussian_kernel(sigma));
}


std::string_view to_string(ErrorKind kind)
{
  switch (kind)
  {
    case ErrorKind::FileMissing: return "FileMissing";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnsupportedPixelFormat: return "UnsupportedPixelFormat";
    case ErrorKind::ZeroMass: return "ZeroMass";
    case ErrorKind::DegenerateMap: return "DegenerateMap";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NoObservers: return "NoObservers";
    case ErrorKind::AllFailed: return "AllFailed";
    case ErrorKind::MissingRank: return "MissingRank";
    case ErrorKind::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::EmptyFixations: return "EmptyFixations";
    case ErrorKind::AllFixated: return "AllFixated";
    case ErrorKind::InsufficientNegatives: return "InsufficientNegatives";
    case ErrorKind::EmptyNegativePool: return "EmptyNegativePool";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateVector: return "DegenerateVector";
    case ErrorKind::RankUnderpopulated: return "RankUnderpopulated";
    case ErrorKind::TooManySuperpixels: return "TooManySuperpixels";
    case ErrorKind::NoForeground: return "NoForeground";
    case ErrorKind::NoBackground: return "NoBackground";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::DegenerateBoundary: return "DegenerateBoundary";
    case ErrorKind::UnwritablePath: return "UnwritablePath";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_rank_code(int c) { return c >= 1 && c <= 6; }

RankLabel rank_from_code(int c)
{
  if (!is_rank_code(c)) throw Error(ErrorKind::InvalidInput, "rank code " + std::to_string(c));
  return static_cast<RankLabel>(c);
}

std::string_view to_string(RankLabel r)
{
  switch (r)
  {
    case RankLabel::ES: return "ES";
    case RankLabel::M1: return "M1";
    case RankLabel::M2: return "M2";
    case RankLabel::M3: return "M3";
    case RankLabel::HD: return "HD";
    case RankLabel::BG: return "BG";
  }
  return "?";
}

RankLabel parse_rank(std::string_view name)
{
  for (int c = 1; c <= 6; ++c)
  {
    if (to_string(static_cast<RankLabel>(c)) == name) return static_cast<RankLabel>(c);
  }
  throw Error(ErrorKind::ParseError, "unknown rank '" + std::string(name) + "'");
}

std::uint8_t rank_gray_level(RankLabel r)
{
  if (r == RankLabel::BG) return 0;
  return static_cast<std::uint8_t>(51 * code(r));
}

RankLabel rank_from_gray_level(std::uint8_t level)
{
  if (level == 0) return RankLabel::BG;
  if (level % 51 != 0) throw Error(ErrorKind::InvalidInput, "gray level " + std::to_string(level) + " is not a rank");
  return rank_from_code(level / 51);
}

std::optional<BoundingBox> bounding_box(const BinaryMask& mask)
{
  int x0 = static_cast<int>(mask.cols()), y0 = static_cast<int>(mask.rows()), x1 = -1, y1 = -1;
  for (Eigen::Index y = 0; y < mask.rows(); ++y)
  {
    for (Eigen::Index x = 0; x < mask.cols(); ++x)
    {
      if (!mask(y, x)) continue;
      x0 = std::min(x0, static_cast<int>(x));
      x1 = std::max(x1, static_cast<int>(x));
      y0 = std::min(y0, static_cast<int>(y));
      y1 = std::max(y1, static_cast<int>(y));
    }
  }
  if (x1 < 0) return std::nullopt;
  return BoundingBox{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

double iou(const BoundingBox& a, const BoundingBox& b)
{
  const int ix = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const int iy = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = static_cast<double>(ix) * iy;
  const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
  return uni > 0 ? inter / uni : 0.0;
}

BoundingBox InstanceRecord::box() const
{
  if (bbox) return *bbox;
  auto derived = bounding_box(mask);
  if (!derived) throw Error(ErrorKind::EmptyMask, "instance '" + id + "' has an empty mask");
  return *derived;
}

FixationPointSet::FixationPointSet(int width, int height, std::vector<Pixel> points)
  : width_(width), height_(height), points_(std::move(points))
{
  for (const auto& p : points_)
  {
    if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height)
    {
      throw Error(ErrorKind::InvalidInput,
                  "fixation (" + std::to_string(p.x) + "," + std::to_string(p.y) + ") out of bounds");
    }
  }
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

bool FixationPointSet::contains(Pixel p) const
{
  return std::binary_search(points_.begin(), points_.end(), p);
}

double adaptive_threshold(const ScalarMap& pred) { return std::min(2.0 * pred.mean(), 1.0); }

BinaryMask binarize_adaptive(const ScalarMap& pred)
{
  const double t = adaptive_threshold(pred);
  return ((pred >= t) && (pred > 0)).cast<std::uint8_t>();
}

}  // namespace camo

#pragma once

#include "camo/image_io.hpp"

namespace camo
{

struct SlicConfig
{
  int superpixels = 200;
  double compactness = 10.0;
  int iterations = 10;
};

/// CIE Lab (D65) planes, L in [0,100].
struct LabImage
{
  ScalarMap l;
  ScalarMap a;
  ScalarMap b;
};

LabImage to_lab(const RgbImage& image);

/// Rec. 601 luma scaled to [0,1].
ScalarMap luminance(const RgbImage& image);

enum class Side
{
  Foreground,
  Background,
};

struct Superpixel
{
  int id = 0;
  std::vector<Pixel> members;
  double mean_l = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  /// 32 bins per Lab channel, concatenated; the whole vector sums to 1.
  std::vector<double> color_histogram;
  /// Uniform LBP(8,1), 59 bins, sums to 1.
  std::vector<double> texture_histogram;
  Side side = Side::Background;
};

struct Segmentation
{
  /// Superpixel id per pixel.
  Image<int> labels;
  std::vector<Superpixel> superpixels;
};

/// SLIC in Lab space with grid seeding and enforced connectivity; every
/// superpixel is a single 4-connected component.
Segmentation slic_superpixels(const RgbImage& image, const SlicConfig& config = {});

inline constexpr int kColorBinsPerChannel = 32;
inline constexpr int kLbpBins = 59;

/// Uniform LBP(8,1) code-bin per pixel, in [0, 58]; bin 58 collects
/// non-uniform patterns.
Image<int> uniform_lbp(const ScalarMap& gray);

/// Bin of the all-ones pattern, produced by flat regions.
int lbp_flat_bin();

/// Fills histograms, mean colors and sides (foreground iff > 50% inside gt).
void superpixel_features(const RgbImage& image, Segmentation& segmentation, const BinaryMask& gt,
                         int color_bins = kColorBinsPerChannel);

}  // namespace camo

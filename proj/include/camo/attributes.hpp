#pragma once

#include "camo/superpixels.hpp"

#include <functional>
#include <span>

namespace camo
{

struct ManifestEntry;

enum class ChiSquareMode
{
  Mean,
  ColorOnly,
  TextureOnly,
  Concatenated,
};

enum class CpDirection
{
  /// Flag when the centroid is far from the image center (">").
  Far,
  /// The literal "<" comparison.
  Near,
};

struct GaborConfig
{
  double wavelength = 8.0;
  double sigma = 4.0;
  double aspect = 1.0;
  double phase = 0.0;
  /// Smoothing applied to the mask before estimating outline normals.
  double normal_sigma = 2.0;
};

struct AttributeConfig
{
  SlicConfig slic;
  int color_bins = kColorBinsPerChannel;
  ChiSquareMode chi_mode = ChiSquareMode::Mean;
  double bm_threshold = 0.9;
  double cb_threshold = 0.12;
  double cp_sigma = 0.35;
  CpDirection cp_direction = CpDirection::Far;
  double dc_threshold = 0.35;
  double so_threshold = 0.02;
  double sa_response = 0.7;
  double sa_iou = 0.5;
  GaborConfig gabor;
};

struct ScoredFlag
{
  bool flag = false;
  double score = 0.0;
};

/// 0.5 * sum (h - g)^2 / (h + g + 1e-10).
double chi_square(std::span<const double> h, std::span<const double> g);

double superpixel_distance(const Superpixel& fg, const Superpixel& bg, ChiSquareMode mode);

/// Mean over foreground superpixels of the mean distance to all background
/// superpixels; flag = score < threshold.
ScoredFlag bm_flag(std::span<const Superpixel> superpixels, const AttributeConfig& config = {});

/// Background complexity measure; returns a score in [0,1].
struct ComplexityMeasure
{
  std::string name;
  std::function<double(const RgbImage&, const BinaryMask& background)> compute;
};

/// Mean central-difference luminance gradient magnitude over the background,
/// normalized by the largest attainable magnitude.
ComplexityMeasure mean_gradient_complexity();

ScoredFlag cb_flag(const RgbImage& image, const BinaryMask& gt, const AttributeConfig& config = {},
                   const ComplexityMeasure& measure = mean_gradient_complexity());

/// Centroid of the mask in pixel-center coordinates.
std::array<double, 2> mask_centroid(const BinaryMask& mask);

bool cp_flag(const BinaryMask& instance, const AttributeConfig& config = {});

/// Mask pixels with a 4-neighbour outside the mask.
std::vector<Pixel> mask_outline(const BinaryMask& mask);

/// Mean over outline points of E_perp / (E_par + E_perp), where E_par is the
/// Gabor energy for edges running along the outline and E_perp for edges
/// crossing it.
double gabrat(const ScalarMap& gray, const BinaryMask& instance, const GaborConfig& config = {});

ScoredFlag dc_gabrat(const RgbImage& image, const BinaryMask& instance, const AttributeConfig& config = {});

bool so_flag(const BinaryMask& instance, const AttributeConfig& config = {});

std::optional<bool> sa_flag(const std::optional<ScalarMap>& saliency, const BinaryMask& instance,
                            const AttributeConfig& config = {});

struct AttributeRow
{
  std::string image_id;
  std::string instance_id;
  std::optional<bool> bm, cb, cp, dc, mm, oc, sa, so;
  std::optional<double> bm_score, cb_score, gabrat;
  std::vector<std::string> notes;
};

/// One row per instance (the gt mask stands in when the entry lists none).
/// Failures are recorded per attribute in notes; other attributes still run.
std::vector<AttributeRow> classify_attributes(const ManifestEntry& entry, const AttributeConfig& config = {});

void write_attribute_csv(const std::filesystem::path& path, std::span<const AttributeRow> rows);
std::vector<AttributeRow> read_attribute_csv(const std::filesystem::path& path);

}  // namespace camo

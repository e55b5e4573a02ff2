#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace camo
{

/// Dense raster, row-major, indexed (y, x) with the origin at the top-left.
template <typename Scalar>
using Image = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ScalarMap = Image<double>;
using BinaryMask = Image<std::uint8_t>;
/// Per-pixel rank codes, see RankLabel.
using RankMap = Image<std::uint8_t>;

enum class ErrorKind
{
  FileMissing,
  DimensionMismatch,
  UnsupportedPixelFormat,
  ZeroMass,
  DegenerateMap,
  EmptyInput,
  NoObservers,
  AllFailed,
  MissingRank,
  EmptyGroundTruth,
  NotNormalized,
  EmptyFixations,
  AllFixated,
  InsufficientNegatives,
  EmptyNegativePool,
  LengthMismatch,
  DegenerateVector,
  RankUnderpopulated,
  TooManySuperpixels,
  NoForeground,
  NoBackground,
  EmptyMask,
  DegenerateBoundary,
  UnwritablePath,
  InvalidConfig,
  InvalidInput,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
  {
  }

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Camouflage rank. Codes are fixed: ES=1 (easiest) ... HD=5 (hardest), BG=6.
enum class RankLabel : std::uint8_t
{
  ES = 1,
  M1 = 2,
  M2 = 3,
  M3 = 4,
  HD = 5,
  BG = 6,
};

constexpr int code(RankLabel r) { return static_cast<int>(r); }
bool is_rank_code(int code);
RankLabel rank_from_code(int code);
std::string_view to_string(RankLabel r);
RankLabel parse_rank(std::string_view name);
/// 8-bit gray level used when writing rank maps (BG=0, ES=51, ..., HD=255).
std::uint8_t rank_gray_level(RankLabel r);
RankLabel rank_from_gray_level(std::uint8_t level);

inline constexpr RankLabel kForegroundRanks[] = {RankLabel::ES, RankLabel::M1, RankLabel::M2,
                                                 RankLabel::M3, RankLabel::HD};

struct BoundingBox
{
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  long area() const { return static_cast<long>(w) * h; }
  bool operator==(const BoundingBox&) const = default;
};

/// Tight axis-aligned bound of the nonzero pixels; nullopt for an empty mask.
std::optional<BoundingBox> bounding_box(const BinaryMask& mask);
double iou(const BoundingBox& a, const BoundingBox& b);

struct InstanceRecord
{
  std::string id;
  BinaryMask mask;
  std::optional<BoundingBox> bbox;
  std::optional<RankLabel> rank;
  std::optional<double> score;

  /// The stored bbox, or the one derived from the mask.
  BoundingBox box() const;
};

struct FixationEvent
{
  std::int64_t timestamp_ms = 0;
  double x = 0.0;
  double y = 0.0;
};

struct FixationSession
{
  std::string image_id;
  std::string observer_id;
  std::int64_t t0_ms = 0;
  std::vector<FixationEvent> events;
};

struct Pixel
{
  int x = 0;
  int y = 0;
  auto operator<=>(const Pixel&) const = default;
};

/// Deduplicated, in-bounds fixation pixels of one image.
class FixationPointSet
{
public:
  FixationPointSet() = default;
  FixationPointSet(int width, int height, std::vector<Pixel> points);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<Pixel>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  bool contains(Pixel p) const;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Pixel> points_;
};

template <typename A, typename B>
void require_same_dims(const Eigen::ArrayBase<A>& a, const Eigen::ArrayBase<B>& b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols())
  {
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(a.cols()) + "x" + std::to_string(a.rows()) + " vs " +
                  std::to_string(b.cols()) + "x" + std::to_string(b.rows()));
  }
}

}  // namespace camo

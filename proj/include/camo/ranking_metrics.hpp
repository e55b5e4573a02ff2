#pragma once

#include "camo/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>

namespace camo
{

struct MatchConfig
{
  double iou_threshold = 0.25;
  int samplings = 100;
  int repeats = 10;
  std::uint64_t seed = 0;
};

/// Pearson correlation of average-tie ranks.
double spearman(std::span<const double> a, std::span<const double> b);

/// Average (fractional) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> values);

/// Mean absolute difference of rank codes (ES=1 ... BG=6).
double r_mae(const RankMap& pred, const RankMap& gt);

/// Among predictions whose bbox IoU with the ground truth exceeds the
/// threshold, the one with the highest score. Returns its index.
std::optional<std::size_t> match_instance(const InstanceRecord& gt, std::span<const InstanceRecord> predictions,
                                          double iou_threshold);

/// One gt instance with a matched prediction, as used by the Corr sampler.
struct RankPair
{
  RankLabel gt;
  RankLabel predicted;
};

struct RankImage
{
  std::vector<InstanceRecord> gt;
  std::vector<InstanceRecord> predictions;
};

struct CorrPool
{
  std::vector<RankPair> pairs;
  std::size_t unmatched = 0;
};

/// Matches every gt instance; unmatched instances are counted and dropped.
CorrPool build_corr_pool(std::span<const RankImage> images, double iou_threshold);

/// Spearman of one sampled quintuple. A constant predicted vector scores 0.
double quintuple_correlation(std::span<const RankPair, 5> sample);

/// Instance-level ranking correlation: the mean over repeats of the mean over
/// samplings of the Spearman correlation of one matched instance per rank.
double corr(const CorrPool& pool, const MatchConfig& config);
double corr(std::span<const RankImage> images, const MatchConfig& config);

/// 6x6 misranking penalty, indexed (predicted, ground truth) in the order
/// BG, ES, M1, M2, M3, HD.
class PenaltyMatrix
{
public:
  /// |m - n| / 5.
  static PenaltyMatrix linear();
  /// Linear default with the known entry (M3 predicted, ES ground truth) = 0.4.
  static PenaltyMatrix paper_fig5();
  static PenaltyMatrix load(const std::filesystem::path& path);

  explicit PenaltyMatrix(const std::array<std::array<double, 6>, 6>& values);

  double operator()(RankLabel predicted, RankLabel gt) const;
  const std::array<std::array<double, 6>, 6>& values() const { return values_; }
  void save(const std::filesystem::path& path) const;

  /// 0-based position of a label in the matrix order.
  static int index_of(RankLabel r);

private:
  std::array<std::array<double, 6>, 6> values_{};
};

inline double penalty_lookup(const PenaltyMatrix& matrix, RankLabel predicted, RankLabel gt)
{
  return matrix(predicted, gt);
}

/// Same overlap and background semantics as render_rank_map.
RankMap rank_prediction_to_map(std::span<const InstanceRecord> predictions, int width, int height);

/// Union of instance masks.
BinaryMask mask_union(std::span<const InstanceRecord> instances, int width, int height);

}  // namespace camo

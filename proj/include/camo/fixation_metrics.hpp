#pragma once

#include "camo/maps.hpp"

#include <cstdint>
#include <span>

namespace camo
{

inline constexpr double kKldEpsilon = 2.220446e-16;
inline constexpr int kDefaultEmdGrid = 32;
inline constexpr int kDefaultAucSplits = 100;

/// Similarity: sum of pixelwise minima of two distributions.
double sim(const ScalarMap& p, const ScalarMap& q);

/// Pearson linear correlation.
double cc(const ScalarMap& p, const ScalarMap& q);

/// Normalized scanpath saliency: mean z-scored prediction at the fixations.
double nss(const ScalarMap& pred, const FixationPointSet& fixations);

/// KL divergence of the prediction p from the ground truth q, weighted by q.
double kld(const ScalarMap& p, const ScalarMap& q, double eps = kKldEpsilon);

/// Area-average a map onto at most grid x grid cells (never upsampled).
ScalarMap downsample_area(const ScalarMap& map, int grid);

/// Earth mover's distance after area-averaging both maps onto the grid; ground
/// distance is the Euclidean distance between cell centers in cell units.
double emd(const ScalarMap& p, const ScalarMap& q, int grid = kDefaultEmdGrid);

/// Threshold-sweep ROC area. Thresholds are the distinct positive values; the
/// curve is anchored at (0,0) and (1,1) and integrated with the trapezoid rule.
double roc_area(std::span<const double> positives, std::span<const double> negatives);

double auc_judd(const ScalarMap& pred, const FixationPointSet& fixations);

double auc_borji(const ScalarMap& pred, const FixationPointSet& fixations, std::uint64_t seed,
                 int splits = kDefaultAucSplits);

/// Shuffled AUC. Negatives come from other images' fixations; pool points that
/// coincide with this image's fixations are excluded.
double sauc(const ScalarMap& pred, const FixationPointSet& fixations, std::span<const Pixel> other_fixations,
            std::uint64_t seed, int splits = kDefaultAucSplits);

/// Fixated pixels of a binary point map (nonzero = fixation).
FixationPointSet fixations_from_mask(const BinaryMask& points);

}  // namespace camo

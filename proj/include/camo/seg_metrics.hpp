#pragma once

#include "camo/maps.hpp"

namespace camo
{

inline constexpr double kFBetaSquared = 0.3;
inline constexpr double kSMeasureAlpha = 0.5;

/// Mean absolute error between a [0,1] prediction and a binary ground truth.
template <typename P, typename G>
double mae(const Eigen::ArrayBase<P>& pred, const Eigen::ArrayBase<G>& gt)
{
  require_same_dims(pred, gt);
  return (pred.template cast<double>() - gt.template cast<double>()).abs().mean();
}

/// Adaptive-threshold F-measure with beta^2 = 0.3.
double f_measure(const ScalarMap& pred, const BinaryMask& gt);

/// Structure measure: 0.5 * object-aware + 0.5 * region-aware similarity.
double s_measure(const ScalarMap& pred, const BinaryMask& gt);

/// Enhanced-alignment measure on the adaptively binarized prediction.
double e_measure(const ScalarMap& pred, const BinaryMask& gt);

}  // namespace camo

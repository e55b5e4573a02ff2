#pragma once

#include "camo/types.hpp"

#include <cmath>

namespace camo
{

/// All values finite.
template <typename Derived>
bool all_finite(const Eigen::ArrayBase<Derived>& map)
{
  return map.isFinite().all();
}

template <typename Derived>
bool is_unit_normalized(const Eigen::ArrayBase<Derived>& map)
{
  return all_finite(map) && (map >= 0).all() && (map <= 1).all();
}

template <typename Derived>
bool is_distribution(const Eigen::ArrayBase<Derived>& map, double tol = 1e-9)
{
  return all_finite(map) && (map >= 0).all() && std::abs(map.sum() - 1.0) <= tol;
}

/// Divide by the total mass. Throws ZeroMass for an all-zero map.
template <typename Derived>
Image<typename Derived::Scalar> to_distribution(const Eigen::ArrayBase<Derived>& map)
{
  using Scalar = typename Derived::Scalar;
  if ((map < 0).any()) throw Error(ErrorKind::InvalidInput, "to_distribution: negative values");
  const Scalar total = map.sum();
  if (!(total > 0)) throw Error(ErrorKind::ZeroMass, "map has no mass");
  return map / total;
}

template <typename Derived>
typename Derived::Scalar population_std(const Eigen::ArrayBase<Derived>& map)
{
  const auto mean = map.mean();
  return std::sqrt((map - mean).square().mean());
}

/// Standardize to zero mean and unit population standard deviation.
template <typename Derived>
Image<typename Derived::Scalar> z_score(const Eigen::ArrayBase<Derived>& map)
{
  const auto mean = map.mean();
  const auto sd = population_std(map);
  if (!(sd > 0) || map.maxCoeff() == map.minCoeff()) throw Error(ErrorKind::DegenerateMap, "zero standard deviation");
  return (map - mean) / sd;
}

/// Adaptive threshold min(2 * mean, 1) used by the segmentation metrics.
double adaptive_threshold(const ScalarMap& pred);

/// pred >= adaptive threshold. An all-zero map binarizes to empty.
BinaryMask binarize_adaptive(const ScalarMap& pred);

/// Isotropic Gaussian blur truncated at 3 sigma, zero padding outside the map.
ScalarMap gaussian_blur(const ScalarMap& map, double sigma);

inline ScalarMap mask_to_map(const BinaryMask& mask) { return mask.cast<double>(); }

inline long count_nonzero(const BinaryMask& mask) { return (mask != 0).count(); }

}  // namespace camo

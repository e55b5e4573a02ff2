#pragma once

#include "camo/types.hpp"

#include <cmath>

namespace camo
{

/// exp(|s_b - s_l|) per pixel; values lie in [1, e] for unit-normalized inputs.
template <typename A, typename B>
Image<double> reverse_attention(const Eigen::ArrayBase<A>& segmentation, const Eigen::ArrayBase<B>& localization)
{
  require_same_dims(segmentation, localization);
  return (segmentation.template cast<double>() - localization.template cast<double>()).abs().exp();
}

enum class RankingAttentionMode
{
  /// 1 + exp(-s_r) on the foreground, 1 on the background.
  Graded,
  /// 1 + exp(-[s_r > 0]): 1 + 1/e on the foreground, 2 on the background.
  Literal,
};

/// Attention over rank codes: harder instances (smaller codes) get more weight.
ScalarMap ranking_attention(const ScalarMap& rank_codes, const BinaryMask& foreground,
                            RankingAttentionMode mode = RankingAttentionMode::Graded);

/// Rank map as real codes, with the foreground taken as every non-BG pixel.
ScalarMap ranking_attention(const RankMap& ranks, RankingAttentionMode mode = RankingAttentionMode::Graded);

}  // namespace camo

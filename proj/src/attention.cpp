#include "camo/attention.hpp"

namespace camo
{

ScalarMap ranking_attention(const ScalarMap& rank_codes, const BinaryMask& foreground, RankingAttentionMode mode)
{
  require_same_dims(rank_codes, foreground);
  const auto fg = foreground.cast<double>() != 0.0;
  if (mode == RankingAttentionMode::Literal)
  {
    // The indicator is 1 on the foreground and 0 elsewhere.
    return 1.0 + (-fg.cast<double>()).exp();
  }
  return fg.select(1.0 + (-rank_codes).exp(), ScalarMap::Ones(rank_codes.rows(), rank_codes.cols()));
}

ScalarMap ranking_attention(const RankMap& ranks, RankingAttentionMode mode)
{
  const BinaryMask fg = (ranks != static_cast<std::uint8_t>(code(RankLabel::BG))).cast<std::uint8_t>();
  return ranking_attention(ranks.cast<double>().eval(), fg, mode);
}

}  // namespace camo

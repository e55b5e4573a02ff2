#pragma once

#include <Eigen/Core>

#include <span>

namespace camo
{

struct TransportResult
{
  double cost = 0.0;
  /// Optimal plan, supply x demand. Only filled when requested.
  Eigen::MatrixXd plan;
  long iterations = 0;
};

/// Exact balanced transportation problem, solved with a primal network simplex
/// (block-search pivoting, strongly feasible spanning-tree bookkeeping).
///
/// Requires nonnegative supplies and demands with equal totals (demands are
/// rescaled to the supply total to absorb rounding). cost is supply x demand.
TransportResult solve_transport(std::span<const double> supply, std::span<const double> demand,
                                const Eigen::MatrixXd& cost, bool want_plan = false);

}  // namespace camo

#pragma once

#include <cstddef>

#include "equivocation/joint_distribution.hpp"

namespace equivocation {

/// Tolerance on the slack of a bound check.
inline constexpr double kBoundSlackTolerance = 1e-9;
/// Slack on the theorem range edge 1 - 1/nx, which is not exact in binary.
inline constexpr double kEdgeTolerance = 1e-12;

struct BoundResult {
  double epsilon;
  std::size_t nx;
  double value;  ///< bits
  bool clamped;  ///< epsilon > 1 - 1/nx, value is the envelope log2(nx)
};

/// eps log2(nx - 1) + h(eps) for eps in [0, 1 - 1/nx]; log2(nx) beyond that.
/// Throws DomainError when nx < 2 or eps is outside [0, 1].
BoundResult continuity_bound(double epsilon, std::size_t nx);

/// Saturating pair: q is a point mass at (1, 1); p keeps 1 - eps there and
/// spreads eps evenly over the other X outcomes of block 1.
/// Requires 0 < eps <= 1 - 1/nx.
DistributionPair extremal_pair(double epsilon, std::size_t nx, std::size_t ny);

struct BoundCheck {
  double gap;          ///< |H(X|Y)_p - H(X|Y)_q|
  double tv;
  double bound_at_tv;
  double slack;        ///< bound_at_tv - gap
  bool holds;          ///< slack >= -kBoundSlackTolerance
};

/// For nx = 1 both equivocations vanish and the bound is taken as 0.
BoundCheck check_bound(const DistributionPair& pair);

}  // namespace equivocation

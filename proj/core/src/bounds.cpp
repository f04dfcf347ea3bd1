#include "equivocation/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "equivocation/entropy.hpp"
#include "equivocation/errors.hpp"

namespace equivocation {

BoundResult continuity_bound(double epsilon, std::size_t nx) {
  if (nx < 2) throw DomainError("continuity bound needs nx >= 2");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    std::ostringstream msg;
    msg << "epsilon " << epsilon << " is outside [0, 1]";
    throw DomainError(msg.str());
  }
  const double n = static_cast<double>(nx);
  const double edge = 1.0 - 1.0 / n;
  const double envelope = std::log2(n);
  if (epsilon > edge + kEdgeTolerance) return {epsilon, nx, envelope, true};
  // The formula peaks at log2(nx) on the edge; rounding can overshoot it.
  const double value = epsilon * std::log2(n - 1.0) + binary_entropy(epsilon);
  return {epsilon, nx, std::min(value, envelope), false};
}

DistributionPair extremal_pair(double epsilon, std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 1) throw DomainError("extremal pair needs nx >= 2 and ny >= 1");
  const double edge = 1.0 - 1.0 / static_cast<double>(nx);
  if (!(epsilon > 0.0 && epsilon <= edge + kEdgeTolerance)) {
    std::ostringstream msg;
    msg << "epsilon " << epsilon << " is outside (0, " << edge << "]";
    throw DomainError(msg.str());
  }
  std::vector<double> p(nx * ny, 0.0);
  p[0] = 1.0 - epsilon;
  const double spread = epsilon / static_cast<double>(nx - 1);
  for (std::size_t i = 1; i < nx; ++i) p[i] = spread;
  return DistributionPair(JointDistribution(nx, ny, std::move(p)),
                          JointDistribution::point_mass(nx, ny, 0, 0));
}

BoundCheck check_bound(const DistributionPair& pair) {
  BoundCheck out{};
  out.gap = std::abs(conditional_entropy(pair.p) - conditional_entropy(pair.q));
  out.tv = std::min(tv_distance(pair.p, pair.q), 1.0);
  out.bound_at_tv = pair.nx() < 2 ? 0.0 : continuity_bound(out.tv, pair.nx()).value;
  out.slack = out.bound_at_tv - out.gap;
  out.holds = out.slack >= -kBoundSlackTolerance;
  return out;
}

}  // namespace equivocation

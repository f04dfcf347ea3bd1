#include "equivocation/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "equivocation/errors.hpp"

namespace equivocation {

namespace {

double clamp_probability(double x) {
  if (!(x >= -kClampTolerance && x <= 1.0 + kMassTolerance)) {
    std::ostringstream msg;
    msg << "value " << x << " is outside [0, 1]";
    throw DomainError(msg.str());
  }
  return x < 0.0 ? 0.0 : x;
}

}  // namespace

double eta(double x) {
  x = clamp_probability(x);
  if (x == 0.0) return 0.0;
  return x * std::log2(x);
}

double binary_entropy(double eps) {
  eps = clamp_probability(eps);
  if (eps > 1.0) eps = 1.0;
  return -eta(eps) - eta(1.0 - eps);
}

double entropy(std::span<const double> v) {
  double h = 0.0;
  for (double x : v) h -= eta(x);
  return h;
}

std::vector<double> marginal(const JointDistribution& joint, Axis axis) {
  std::vector<double> out(axis == Axis::X ? joint.nx() : joint.ny(), 0.0);
  for (std::size_t j = 0; j < joint.ny(); ++j) {
    for (std::size_t i = 0; i < joint.nx(); ++i) {
      out[axis == Axis::X ? i : j] += joint(i, j);
    }
  }
  return out;
}

double joint_entropy(const JointDistribution& joint) { return entropy(joint.values()); }

double conditional_entropy(const JointDistribution& joint, ConditionalFormula formula) {
  switch (formula) {
    case ConditionalFormula::Difference:
      return joint_entropy(joint) - entropy(marginal(joint, Axis::Y));

    case ConditionalFormula::Mixture: {
      // p_Y(j) H(X | Y = j) = eta(p_Y(j)) - sum_i eta(p(i, j)), written out so
      // that the conditional distribution itself is evaluated.
      double h = 0.0;
      for (std::size_t j = 0; j < joint.ny(); ++j) {
        const auto block = joint.block(j);
        double mass = 0.0;
        for (double x : block) mass += x;
        if (mass <= 0.0) continue;
        double block_entropy = 0.0;
        for (double x : block) {
          if (x > 0.0) block_entropy -= eta(std::min(x / mass, 1.0));
        }
        h += mass * block_entropy;
      }
      return h;
    }

    case ConditionalFormula::Direct: {
      const auto py = marginal(joint, Axis::Y);
      double h = 0.0;
      for (std::size_t j = 0; j < joint.ny(); ++j) {
        if (py[j] <= 0.0) continue;
        for (double x : joint.block(j)) {
          if (x > 0.0) h -= x * std::log2(x / py[j]);
        }
      }
      return h;
    }
  }
  throw DomainError("unknown conditional entropy formula");
}

double tv_distance(const JointDistribution& p, const JointDistribution& q) {
  if (p.nx() != q.nx() || p.ny() != q.ny()) {
    throw ShapeMismatch("tv_distance: shapes differ");
  }
  const auto a = p.values();
  const auto b = q.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
  return 0.5 * sum;
}

}  // namespace equivocation

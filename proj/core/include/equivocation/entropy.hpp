#pragma once

#include <span>
#include <vector>

#include "equivocation/joint_distribution.hpp"

namespace equivocation {

// All logarithms are base 2; results are in bits.

/// x log2 x with eta(0) = 0. Accepts x in [-1e-12, 1 + 1e-9].
double eta(double x);

/// h(eps) = -eta(eps) - eta(1 - eps).
double binary_entropy(double eps);

/// Shannon entropy of a (possibly sub-normalized) nonnegative vector.
double entropy(std::span<const double> v);

enum class Axis { X, Y };

/// Axis::Y gives p_Y(j) = sum_i p(i, j); Axis::X gives p_X(i).
std::vector<double> marginal(const JointDistribution& joint, Axis axis);

/// H(XY).
double joint_entropy(const JointDistribution& joint);

/// Three algebraically equivalent routes to H(X|Y).
enum class ConditionalFormula {
  Difference,  ///< H(XY) - H(Y)
  Mixture,     ///< sum_j p_Y(j) H(X | Y = j)
  Direct,      ///< -sum_ij p(i,j) log2(p(i,j) / p_Y(j))
};

/// Equivocation H(X|Y). Blocks with p_Y(j) = 0 contribute 0.
double conditional_entropy(const JointDistribution& joint,
                           ConditionalFormula formula = ConditionalFormula::Mixture);

/// Half the l1 distance. Throws ShapeMismatch if the grids differ.
double tv_distance(const JointDistribution& p, const JointDistribution& q);

}  // namespace equivocation

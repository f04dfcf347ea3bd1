#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace equivocation {

/// Entries in [-kClampTolerance, 0) are treated as exact zeros.
inline constexpr double kClampTolerance = 1e-12;
/// Allowed deviation of the total mass from 1.
inline constexpr double kMassTolerance = 1e-9;

/// Joint probability mass function p(i, j) on an nx-by-ny grid.
///
/// Entries are stored block-major: all nx entries that share a Y label j are
/// contiguous, so `block(j)` is a view of the conditional slice p(., j).
/// Indices are 0-based in code; traces and documents print them 1-based.
/// Values are immutable after construction.
class JointDistribution {
 public:
  /// Validates and clamps. Throws DomainError on a bad entry or mass.
  JointDistribution(std::size_t nx, std::size_t ny, std::vector<double> block_major);

  /// Builds from rows indexed [i][j], the layout used by the file format.
  static JointDistribution from_rows(const std::vector<std::vector<double>>& rows);

  /// Point mass on (i, j).
  static JointDistribution point_mass(std::size_t nx, std::size_t ny, std::size_t i, std::size_t j);

  static JointDistribution uniform(std::size_t nx, std::size_t ny);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[j * nx_ + i]; }

  std::span<const double> block(std::size_t j) const noexcept {
    return std::span<const double>(values_).subspan(j * nx_, nx_);
  }
  std::span<const double> values() const noexcept { return values_; }

  std::vector<std::vector<double>> rows() const;

  double total_mass() const noexcept;

  friend bool operator==(const JointDistribution&, const JointDistribution&) = default;

 private:
  std::size_t nx_;
  std::size_t ny_;
  std::vector<double> values_;
};

/// Ordered pair (p, q) over a common alphabet.
struct DistributionPair {
  DistributionPair(JointDistribution p_, JointDistribution q_);

  JointDistribution p;
  JointDistribution q;

  std::size_t nx() const noexcept { return p.nx(); }
  std::size_t ny() const noexcept { return p.ny(); }

  friend bool operator==(const DistributionPair&, const DistributionPair&) = default;
};

}  // namespace equivocation

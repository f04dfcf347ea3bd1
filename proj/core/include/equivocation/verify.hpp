#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "equivocation/errors.hpp"
#include "equivocation/joint_distribution.hpp"

namespace equivocation {

/// Flat (Dirichlet-1) draw from the (nx*ny - 1)-simplex. Same seed, same bits.
JointDistribution sample_joint(std::size_t nx, std::size_t ny, std::uint64_t seed);

/// Moves min(eps, movable) of mass from random donor entries to random
/// recipient entries, so that TV(p, q) equals the moved mass. `movable` is the
/// mass outside the chosen recipients. Throws DomainError if eps is outside [0, 1].
JointDistribution perturb_within_tv(const JointDistribution& p, double eps, std::uint64_t seed);

/// How the second distribution of each trial is produced.
struct EpsMode {
  /// Absent: independent flat sample. Present: perturb_within_tv at this radius.
  std::optional<double> fixed;

  static EpsMode random() { return {}; }
  static EpsMode fixed_at(double eps) { return {eps}; }
};

struct TrialReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_gap_over_bound_ratio = 0.0;
  std::optional<DistributionPair> worst_pair;
  std::uint64_t seed = 0;
  std::size_t nx = 0;
  std::size_t ny = 0;
};

/// A walk invariant failed inside a verification trial.
class TrialFailure : public InvariantViolation {
 public:
  TrialFailure(std::uint64_t trial_seed, const InvariantViolation& cause)
      : InvariantViolation(cause.step(), std::string(cause.what()) + " [trial seed " +
                                             std::to_string(trial_seed) + "]"),
        trial_seed_(trial_seed) {}

  std::uint64_t trial_seed() const noexcept { return trial_seed_; }

 private:
  std::uint64_t trial_seed_;
};

/// Runs `trials` independent experiments; trial t uses seed + t. Each trial
/// checks the bound and runs the walk. `threads` only affects speed: the
/// report is identical for any value.
TrialReport verify_trials(std::size_t nx, std::size_t ny, std::size_t trials, EpsMode mode,
                          std::uint64_t seed, unsigned threads = 1);

struct GridSearchResult {
  double max_gap;
  double bound;
  DistributionPair argmax_pair;
};

/// Largest products accepted by grid_search_max_gap.
inline constexpr std::size_t kGridMaxCells = 6;
inline constexpr std::size_t kGridMaxSteps = 101;

/// Exhaustive search over pairs on the simplex grid with spacing 1/steps,
/// restricted to TV(p, q) <= eps. Throws DomainError beyond desk scale.
GridSearchResult grid_search_max_gap(std::size_t nx, std::size_t ny, double eps,
                                     std::size_t steps_per_dim);

}  // namespace equivocation

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "equivocation/joint_distribution.hpp"

namespace equivocation {

/// Per-step tolerance for the monotonicity checks of the walk.
inline constexpr double kWalkTolerance = 1e-9;

/// Within block `block`, positions where q >= p (in_set) and where q < p
/// (out_set). Positions refer to the reordered pair, so every member of
/// in_set precedes every member of out_set.
struct BlockPartition {
  std::size_t block;
  std::vector<std::size_t> in_set;
  std::vector<std::size_t> out_set;

  friend bool operator==(const BlockPartition&, const BlockPartition&) = default;
};

enum class SnapshotMode {
  None,    ///< phase-level steps, no distribution copies
  Phases,  ///< phase-level steps with copies of (p, q)
  All,     ///< one step per individual transfer, with copies
};

struct WalkStep {
  std::string label;
  double gap;  ///< H(X|Y)_p - H(X|Y)_q
  double tv;
  std::optional<double> transferred;
  std::optional<DistributionPair> snapshot;
};

/// The three quantities of the closing estimate, for the final pair.
struct WalkEstimate {
  double final_gap;             ///< equals H(p_X) of the averaged p
  double marginal_bound;        ///< (1 - p_X(1)) log2(nx - 1) + h(1 - p_X(1))
  double bound_at_initial_tv;   ///< continuity bound at the input TV
};

struct WalkTrace {
  DistributionPair initial;
  DistributionPair final_pair;
  bool swapped = false;
  std::vector<BlockPartition> partitions;
  std::vector<WalkStep> steps;
  WalkEstimate estimate{};
};

/// Swaps p and q when H(X|Y)_p < H(X|Y)_q. Ties are left alone.
DistributionPair canonical_orient(const DistributionPair& pair);

struct ReorderResult {
  DistributionPair pair;
  std::vector<BlockPartition> partitions;
};

/// Applies one simultaneous symmetry to p and q: blocks sorted so that
/// q_Y(j) - p_Y(j) is non-increasing, and inside each block the q >= p
/// positions first, each group sorted by non-increasing q. All sorts are
/// stable in the original index.
ReorderResult reorder(const DistributionPair& pair);

/// Concentrates the q-excess of the in-set onto position 0, then moves every
/// remaining q(i, j) to position 0 in both p and q. Requires a reordered block
/// with q(0, j) >= p(0, j); throws PreconditionViolation otherwise.
DistributionPair process_block_nonempty(const DistributionPair& pair, std::size_t block);

/// For a reordered block with q < p everywhere: fills q(0, j) from the bottom
/// up, capped at p(0, j) - q(0, j). On reaching equality it continues with
/// process_block_nonempty. Throws PreconditionViolation if the in-set is not
/// empty.
DistributionPair process_block_empty(const DistributionPair& pair, std::size_t block);

/// Replaces every block by the average over all blocks.
JointDistribution average_blocks(const JointDistribution& joint);

/// Orient, reorder, process every block, average. Every step is checked:
/// TV may not increase and the gap may not decrease beyond kWalkTolerance.
/// The end state is checked against the continuity bound at the input TV.
/// Throws InvariantViolation naming the failing step.
WalkTrace run_walk(const DistributionPair& pair, SnapshotMode mode = SnapshotMode::Phases);

}  // namespace equivocation

#pragma once

#include <cstddef>
#include <vector>

#include "equivocation/joint_distribution.hpp"

namespace equivocation {

/// Element of the subgroup of grid permutations that leaves H(X|Y) invariant:
/// a permutation of the Y-blocks together with an independent permutation of
/// X inside each destination block.
///
/// Source entry (i, j) is sent to (within_perms[block_perm[j]][i], block_perm[j]).
class SymmetryElement {
 public:
  /// Throws DomainError unless every vector is a bijection of the right size.
  SymmetryElement(std::vector<std::size_t> block_perm,
                  std::vector<std::vector<std::size_t>> within_perms);

  static SymmetryElement identity(std::size_t nx, std::size_t ny);

  std::size_t nx() const noexcept { return within_perms_.front().size(); }
  std::size_t ny() const noexcept { return block_perm_.size(); }

  const std::vector<std::size_t>& block_perm() const noexcept { return block_perm_; }
  const std::vector<std::vector<std::size_t>>& within_perms() const noexcept {
    return within_perms_;
  }

 private:
  std::vector<std::size_t> block_perm_;
  std::vector<std::vector<std::size_t>> within_perms_;
};

/// out(i, j) = J(within_perms[j]^-1(i), block_perm^-1(j)).
JointDistribution apply_symmetry(const JointDistribution& joint, const SymmetryElement& g);

}  // namespace equivocation

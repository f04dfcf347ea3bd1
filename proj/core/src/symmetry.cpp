#include "equivocation/symmetry.hpp"

#include <numeric>

#include "equivocation/errors.hpp"

namespace equivocation {

namespace {

bool is_bijection(const std::vector<std::size_t>& perm) {
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t v : perm) {
    if (v >= perm.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

std::vector<std::size_t> iota_vector(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

SymmetryElement::SymmetryElement(std::vector<std::size_t> block_perm,
                                 std::vector<std::vector<std::size_t>> within_perms)
    : block_perm_(std::move(block_perm)), within_perms_(std::move(within_perms)) {
  if (block_perm_.empty() || !is_bijection(block_perm_)) {
    throw DomainError("block permutation is not a bijection");
  }
  if (within_perms_.size() != block_perm_.size()) {
    throw DomainError("need one within-block permutation per block");
  }
  const std::size_t n = within_perms_.front().size();
  for (const auto& perm : within_perms_) {
    if (perm.empty() || perm.size() != n || !is_bijection(perm)) {
      throw DomainError("within-block permutation is not a bijection");
    }
  }
}

SymmetryElement SymmetryElement::identity(std::size_t nx, std::size_t ny) {
  return SymmetryElement(iota_vector(ny), std::vector<std::vector<std::size_t>>(ny, iota_vector(nx)));
}

JointDistribution apply_symmetry(const JointDistribution& joint, const SymmetryElement& g) {
  if (g.nx() != joint.nx() || g.ny() != joint.ny()) {
    throw ShapeMismatch("symmetry element does not match the grid");
  }
  const std::size_t nx = joint.nx();
  std::vector<double> out(joint.size());
  for (std::size_t j = 0; j < joint.ny(); ++j) {
    const std::size_t dest_block = g.block_perm()[j];
    const auto& within = g.within_perms()[dest_block];
    for (std::size_t i = 0; i < nx; ++i) {
      out[dest_block * nx + within[i]] = joint(i, j);
    }
  }
  return JointDistribution(nx, joint.ny(), std::move(out));
}

}  // namespace equivocation

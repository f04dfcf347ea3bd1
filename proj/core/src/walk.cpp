#include "equivocation/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "equivocation/bounds.hpp"
#include "equivocation/entropy.hpp"
#include "equivocation/errors.hpp"

namespace equivocation {

namespace {

std::string block_label(std::size_t block, const char* phase) {
  std::ostringstream out;
  out << "block " << block + 1 << ": " << phase;
  return out.str();
}

std::string micro_label(std::size_t block, const char* phase, std::size_t row) {
  std::ostringstream out;
  out << "block " << block + 1 << ": " << phase << " " << row + 1;
  return out.str();
}

// Mutable working copy of a pair. Every mutation goes through `commit`, which
// re-evaluates TV and the gap and rejects any step that moves either the wrong
// way. Steps are recorded into `steps` when one is attached.
class Walker {
 public:
  Walker(const DistributionPair& pair, SnapshotMode mode, std::vector<WalkStep>* steps)
      : nx_(pair.nx()),
        ny_(pair.ny()),
        p_(pair.p.values().begin(), pair.p.values().end()),
        q_(pair.q.values().begin(), pair.q.values().end()),
        mode_(mode),
        steps_(steps) {
    evaluate(gap_, tv_, q_entropy_);
  }

  double& p(std::size_t i, std::size_t j) { return p_[j * nx_ + i]; }
  double& q(std::size_t i, std::size_t j) { return q_[j * nx_ + i]; }

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double gap() const { return gap_; }
  double tv() const { return tv_; }

  DistributionPair pair() const {
    return DistributionPair(JointDistribution(nx_, ny_, p_), JointDistribution(nx_, ny_, q_));
  }

  // Re-checks the state after a mutation. `q_must_not_grow` additionally
  // requires H(X|Y)_q not to increase.
  void commit(const std::string& label, bool q_must_not_grow) {
    double gap = 0.0;
    double tv = 0.0;
    double hq = 0.0;
    evaluate(gap, tv, hq);
    if (tv > tv_ + kWalkTolerance) {
      throw InvariantViolation(label, "total variation increased from " + num(tv_) + " to " +
                                          num(tv));
    }
    if (gap < gap_ - kWalkTolerance) {
      throw InvariantViolation(label, "entropy gap decreased from " + num(gap_) + " to " +
                                          num(gap));
    }
    if (q_must_not_grow && hq > q_entropy_ + kWalkTolerance) {
      throw InvariantViolation(label, "H(X'|Y') increased from " + num(q_entropy_) + " to " +
                                          num(hq));
    }
    gap_ = gap;
    tv_ = tv;
    q_entropy_ = hq;
  }

  void record(std::string label, std::optional<double> transferred, bool micro) {
    if (steps_ == nullptr) return;
    const bool wanted = micro ? mode_ == SnapshotMode::All : mode_ != SnapshotMode::All;
    if (!wanted) return;
    WalkStep step{std::move(label), gap_, tv_, transferred, std::nullopt};
    if (mode_ != SnapshotMode::None) step.snapshot = pair();
    steps_->push_back(std::move(step));
  }

  // Phase 1 then Phase 2 on a block where q(0) >= p(0).
  void concentrate_and_transfer(std::size_t j) {
    double moved = 0.0;
    for (std::size_t i = 1; i < nx_; ++i) {
      if (q(i, j) < p(i, j)) continue;
      const double excess = q(i, j) - p(i, j);
      q(0, j) += excess;
      q(i, j) = p(i, j);
      moved += excess;
      const auto label = micro_label(j, "concentrate", i);
      commit(label, true);
      record(label, excess, true);
    }
    if (q(0, j) < p(0, j)) {
      throw InvariantViolation(block_label(j, "concentrate"), "q(1, j) fell below p(1, j)");
    }
    commit(block_label(j, "concentrate"), true);
    record(block_label(j, "concentrate"), moved, false);
    transfer(j);
  }

  // Phase 2: move q(i) to the top in both distributions.
  void transfer(std::size_t j) {
    double moved = 0.0;
    for (std::size_t i = 1; i < nx_; ++i) {
      const double s = q(i, j);
      if (p(i, j) < s) {
        throw InvariantViolation(micro_label(j, "transfer", i), "p(i, j) < q(i, j)");
      }
      q(0, j) += s;
      p(0, j) += s;
      q(i, j) = 0.0;
      p(i, j) -= s;
      moved += s;
      const auto label = micro_label(j, "transfer", i);
      commit(label, false);
      record(label, s, true);
    }
    commit(block_label(j, "transfer"), false);
    record(block_label(j, "transfer"), moved, false);
  }

  // Empty in-set: fill q(0) from the bottom up, within q only.
  void fill(std::size_t j) {
    double moved = 0.0;
    bool reached = false;
    for (std::size_t i = nx_ - 1; i >= 1 && !reached; --i) {
      const double cap = p(0, j) - q(0, j);
      const double source = q(i, j);
      double amount = source;
      if (cap <= source) {
        amount = cap;
        q(0, j) = p(0, j);
        q(i, j) = source - cap;
        reached = true;
      } else {
        q(0, j) += source;
        q(i, j) = 0.0;
      }
      moved += amount;
      const auto label = micro_label(j, "fill", i);
      commit(label, true);
      record(label, amount, true);
    }
    commit(block_label(j, "fill"), true);
    record(block_label(j, "fill"), moved, false);
    if (reached) transfer(j);
  }

  void process_block(std::size_t j) {
    const double p_mass = block_mass(p_, j);
    const double q_mass = block_mass(q_, j);
    if (q(0, j) >= p(0, j)) {
      concentrate_and_transfer(j);
    } else {
      fill(j);
    }
    const auto label = block_label(j, "done");
    if (std::abs(block_mass(p_, j) - p_mass) > 1e-12 ||
        std::abs(block_mass(q_, j) - q_mass) > 1e-12) {
      throw InvariantViolation(label, "block mass changed");
    }
    for (std::size_t i = 1; i < nx_; ++i) {
      if (q(i, j) != 0.0) throw InvariantViolation(label, "q(i, j) != 0 for some i > 1");
    }
  }

  void average() {
    p_ = copy_of(average_blocks(JointDistribution(nx_, ny_, p_)).values());
    q_ = copy_of(average_blocks(JointDistribution(nx_, ny_, q_)).values());
    commit("average", false);
    if (mode_ == SnapshotMode::All) {
      record("average", std::nullopt, true);
    } else {
      record("average", std::nullopt, false);
    }
  }

 private:
  static std::vector<double> copy_of(std::span<const double> s) { return {s.begin(), s.end()}; }

  static std::string num(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
  }

  double block_mass(const std::vector<double>& v, std::size_t j) const {
    return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(j * nx_),
                           v.begin() + static_cast<std::ptrdiff_t>((j + 1) * nx_), 0.0);
  }

  void evaluate(double& gap, double& tv, double& hq) const {
    const JointDistribution p(nx_, ny_, p_);
    const JointDistribution q(nx_, ny_, q_);
    hq = conditional_entropy(q);
    gap = conditional_entropy(p) - hq;
    tv = tv_distance(p, q);
  }

  std::size_t nx_;
  std::size_t ny_;
  std::vector<double> p_;
  std::vector<double> q_;
  SnapshotMode mode_;
  std::vector<WalkStep>* steps_;
  double gap_ = 0.0;
  double tv_ = 0.0;
  double q_entropy_ = 0.0;
};

std::vector<std::size_t> in_set_of(const DistributionPair& pair, std::size_t j) {
  std::vector<std::size_t> in;
  for (std::size_t i = 0; i < pair.nx(); ++i) {
    if (pair.q(i, j) >= pair.p(i, j)) in.push_back(i);
  }
  return in;
}

// In-set is a prefix and both groups are sorted by non-increasing q.
void require_canonical_block(const DistributionPair& pair, std::size_t j) {
  if (j >= pair.ny()) throw PreconditionViolation("block index out of range");
  const auto in = in_set_of(pair, j);
  for (std::size_t k = 0; k < in.size(); ++k) {
    if (in[k] != k) {
      throw PreconditionViolation(block_label(j, "in-set is not a prefix; reorder first"));
    }
  }
  for (std::size_t i = 1; i < pair.nx(); ++i) {
    if (i == in.size()) continue;
    if (pair.q(i, j) > pair.q(i - 1, j)) {
      throw PreconditionViolation(block_label(j, "q is not non-increasing; reorder first"));
    }
  }
}

}  // namespace

DistributionPair canonical_orient(const DistributionPair& pair) {
  if (conditional_entropy(pair.p) < conditional_entropy(pair.q)) {
    return DistributionPair(pair.q, pair.p);
  }
  return pair;
}

ReorderResult reorder(const DistributionPair& pair) {
  const std::size_t nx = pair.nx();
  const std::size_t ny = pair.ny();
  const auto py = marginal(pair.p, Axis::Y);
  const auto qy = marginal(pair.q, Axis::Y);

  std::vector<std::size_t> blocks(ny);
  std::iota(blocks.begin(), blocks.end(), std::size_t{0});
  std::stable_sort(blocks.begin(), blocks.end(), [&](std::size_t a, std::size_t b) {
    return qy[a] - py[a] > qy[b] - py[b];
  });

  std::vector<double> p(nx * ny);
  std::vector<double> q(nx * ny);
  std::vector<BlockPartition> partitions;
  partitions.reserve(ny);

  for (std::size_t dest = 0; dest < ny; ++dest) {
    const std::size_t src = blocks[dest];
    std::vector<std::size_t> in;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nx; ++i) {
      (pair.q(i, src) >= pair.p(i, src) ? in : out).push_back(i);
    }
    const auto by_q_desc = [&](std::size_t a, std::size_t b) {
      return pair.q(a, src) > pair.q(b, src);
    };
    std::stable_sort(in.begin(), in.end(), by_q_desc);
    std::stable_sort(out.begin(), out.end(), by_q_desc);

    BlockPartition part{dest, {}, {}};
    std::size_t row = 0;
    for (std::size_t i : in) {
      p[dest * nx + row] = pair.p(i, src);
      q[dest * nx + row] = pair.q(i, src);
      part.in_set.push_back(row++);
    }
    for (std::size_t i : out) {
      p[dest * nx + row] = pair.p(i, src);
      q[dest * nx + row] = pair.q(i, src);
      part.out_set.push_back(row++);
    }
    partitions.push_back(std::move(part));
  }

  return {DistributionPair(JointDistribution(nx, ny, std::move(p)),
                           JointDistribution(nx, ny, std::move(q))),
          std::move(partitions)};
}

DistributionPair process_block_nonempty(const DistributionPair& pair, std::size_t block) {
  require_canonical_block(pair, block);
  if (pair.q(0, block) < pair.p(0, block)) {
    throw PreconditionViolation(block_label(block, "in-set is empty"));
  }
  Walker walker(pair, SnapshotMode::None, nullptr);
  walker.process_block(block);
  return walker.pair();
}

DistributionPair process_block_empty(const DistributionPair& pair, std::size_t block) {
  require_canonical_block(pair, block);
  if (pair.q(0, block) >= pair.p(0, block)) {
    throw PreconditionViolation(block_label(block, "in-set is not empty"));
  }
  Walker walker(pair, SnapshotMode::None, nullptr);
  walker.process_block(block);
  return walker.pair();
}

JointDistribution average_blocks(const JointDistribution& joint) {
  const std::size_t nx = joint.nx();
  const std::size_t ny = joint.ny();
  const auto px = marginal(joint, Axis::X);
  std::vector<double> out(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) out[j * nx + i] = px[i] / static_cast<double>(ny);
  }
  return JointDistribution(nx, ny, std::move(out));
}

WalkTrace run_walk(const DistributionPair& pair, SnapshotMode mode) {
  const std::size_t nx = pair.nx();
  const double initial_tv = tv_distance(pair.p, pair.q);
  const double initial_gap =
      std::abs(conditional_entropy(pair.p) - conditional_entropy(pair.q));

  std::vector<WalkStep> steps;
  const auto push = [&](const char* label, const DistributionPair& snapshot, double gap,
                        double tv) {
    WalkStep step{label, gap, tv, std::nullopt, std::nullopt};
    if (mode != SnapshotMode::None) step.snapshot = snapshot;
    steps.push_back(std::move(step));
  };

  push("initial", pair, initial_gap, initial_tv);

  const DistributionPair oriented = canonical_orient(pair);
  const bool swapped = !(oriented == pair);
  auto [ordered, partitions] = reorder(oriented);

  Walker walker(ordered, mode, &steps);
  if (std::abs(walker.gap() - initial_gap) > kWalkTolerance ||
      std::abs(walker.tv() - initial_tv) > kWalkTolerance) {
    throw InvariantViolation("reorder", "symmetry changed the gap or the distance");
  }
  push("orient", oriented, initial_gap, initial_tv);
  push("reorder", ordered, walker.gap(), walker.tv());

  for (std::size_t j = 0; j < walker.ny(); ++j) walker.process_block(j);
  walker.average();

  WalkTrace trace{pair, walker.pair(), swapped, std::move(partitions), std::move(steps), {}};
  const auto& final_p = trace.final_pair.p;
  const auto& final_q = trace.final_pair.q;

  if (conditional_entropy(final_q) > kWalkTolerance) {
    throw InvariantViolation("final", "H(X'|Y') did not reach zero");
  }
  const auto qx = marginal(final_q, Axis::X);
  if (std::abs(qx[0] - 1.0) > kWalkTolerance) {
    throw InvariantViolation("final", "q_X(1) != 1");
  }
  if (walker.tv() > initial_tv + kWalkTolerance) {
    throw InvariantViolation("final", "total variation increased over the walk");
  }
  if (walker.gap() < initial_gap - kWalkTolerance) {
    throw InvariantViolation("final", "entropy gap decreased over the walk");
  }

  const auto px = marginal(final_p, Axis::X);
  const double tail = std::clamp(1.0 - px[0], 0.0, 1.0);
  WalkEstimate& est = trace.estimate;
  est.final_gap = walker.gap();
  if (nx >= 2) {
    est.marginal_bound =
        tail * std::log2(static_cast<double>(nx - 1)) + binary_entropy(tail);
    est.bound_at_initial_tv = continuity_bound(std::min(initial_tv, 1.0), nx).value;
  }
  if (std::abs(est.final_gap - entropy(px)) > kWalkTolerance) {
    throw InvariantViolation("estimate", "final gap differs from H(p_X)");
  }
  if (est.final_gap > est.marginal_bound + kWalkTolerance) {
    throw InvariantViolation("estimate", "H(p_X) exceeds the maximum-entropy tail bound");
  }
  if (est.marginal_bound > est.bound_at_initial_tv + kWalkTolerance) {
    throw InvariantViolation("estimate", "tail bound exceeds the continuity bound");
  }
  return trace;
}

}  // namespace equivocation

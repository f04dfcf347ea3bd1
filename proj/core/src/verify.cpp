#include "equivocation/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "equivocation/bounds.hpp"
#include "equivocation/entropy.hpp"
#include "equivocation/walk.hpp"

namespace equivocation {

namespace {

// Sub-seed for the second distribution of a trial.
constexpr std::uint64_t kPartnerStream = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Engine output is fixed by the standard; the conversions below avoid the
// library-specific std:: distributions so draws are identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform on (0, 1].
  double open_unit() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  double exponential() { return -std::log(open_unit()); }

  /// Uniform on {0, ..., n - 1}.
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % bound);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[index(k)]);
  }

 private:
  std::mt19937_64 engine_;
};

double gap_over_bound(const BoundCheck& check) {
  if (check.bound_at_tv > 0.0) return check.gap / check.bound_at_tv;
  return check.gap > kBoundSlackTolerance ? std::numeric_limits<double>::infinity() : 0.0;
}

struct ChunkResult {
  std::size_t violations = 0;
  double best_ratio = -1.0;
  std::size_t best_trial = 0;
  std::optional<DistributionPair> best_pair;
  std::exception_ptr failure;
  std::size_t failed_trial = std::numeric_limits<std::size_t>::max();
};

void run_chunk(std::size_t nx, std::size_t ny, std::size_t begin, std::size_t end,
               const EpsMode& mode, std::uint64_t seed, ChunkResult& out) {
  for (std::size_t t = begin; t < end; ++t) {
    const std::uint64_t trial_seed = seed + t;
    try {
      const JointDistribution p = sample_joint(nx, ny, trial_seed);
      JointDistribution q = mode.fixed
                                ? perturb_within_tv(p, *mode.fixed, trial_seed ^ kPartnerStream)
                                : sample_joint(nx, ny, trial_seed ^ kPartnerStream);
      DistributionPair pair(p, std::move(q));

      const BoundCheck check = check_bound(pair);
      if (!check.holds) ++out.violations;
      const double ratio = gap_over_bound(check);

      try {
        run_walk(pair, SnapshotMode::None);
      } catch (const InvariantViolation& e) {
        throw TrialFailure(trial_seed, e);
      }

      if (ratio > out.best_ratio) {
        out.best_ratio = ratio;
        out.best_trial = t;
        out.best_pair = std::move(pair);
      }
    } catch (...) {
      out.failure = std::current_exception();
      out.failed_trial = t;
      return;
    }
  }
}

}  // namespace

JointDistribution sample_joint(std::size_t nx, std::size_t ny, std::uint64_t seed) {
  if (nx == 0 || ny == 0) throw DomainError("sample_joint needs nx >= 1 and ny >= 1");
  Rng rng(seed);
  std::vector<double> values(nx * ny);
  for (double& v : values) v = rng.exponential();
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  for (double& v : values) v /= total;
  return JointDistribution(nx, ny, std::move(values));
}

JointDistribution perturb_within_tv(const JointDistribution& p, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    std::ostringstream msg;
    msg << "perturbation radius " << eps << " is outside [0, 1]";
    throw DomainError(msg.str());
  }
  const std::size_t n = p.size();
  if (eps == 0.0 || n == 1) return p;

  const auto values = p.values();
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  const std::size_t recipients_wanted = 1 + rng.index(n - 1);
  std::vector<bool> is_recipient(n, false);
  for (std::size_t k = 0; k < recipients_wanted; ++k) is_recipient[order[k]] = true;

  const auto movable_mass = [&] {
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (!is_recipient[k]) m += values[k];
    return m;
  };
  double movable = movable_mass();
  if (movable < eps) {
    // Fall back to the single smallest entry as the sink, which frees the
    // most mass. Ties go to the earliest entry in the shuffled order.
    std::size_t sink = order.front();
    for (std::size_t k : order)
      if (values[k] < values[sink]) sink = k;
    std::fill(is_recipient.begin(), is_recipient.end(), false);
    is_recipient[sink] = true;
    movable = movable_mass();
  }
  const double amount = std::min(eps, movable);

  std::vector<double> out(values.begin(), values.end());
  double remaining = amount;
  for (std::size_t k : order) {
    if (is_recipient[k] || remaining <= 0.0) continue;
    if (out[k] >= remaining) {
      out[k] -= remaining;
      remaining = 0.0;
    } else {
      remaining -= out[k];
      out[k] = 0.0;
    }
  }

  std::vector<std::size_t> sinks;
  for (std::size_t k : order)
    if (is_recipient[k]) sinks.push_back(k);
  std::vector<double> weights(sinks.size());
  for (double& w : weights) w = rng.exponential();
  const double weight_total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double given = 0.0;
  for (std::size_t r = 0; r + 1 < sinks.size(); ++r) {
    const double share = amount * weights[r] / weight_total;
    out[sinks[r]] += share;
    given += share;
  }
  out[sinks.back()] += std::max(0.0, amount - given);

  return JointDistribution(p.nx(), p.ny(), std::move(out));
}

TrialReport verify_trials(std::size_t nx, std::size_t ny, std::size_t trials, EpsMode mode,
                          std::uint64_t seed, unsigned threads) {
  if (nx < 2 || ny < 1) throw DomainError("verify_trials needs nx >= 2 and ny >= 1");
  if (trials < 1) throw DomainError("verify_trials needs at least one trial");
  if (mode.fixed && !(*mode.fixed >= 0.0 && *mode.fixed <= 1.0)) {
    throw DomainError("fixed epsilon is outside [0, 1]");
  }

  const std::size_t workers =
      std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, trials);
  std::vector<ChunkResult> chunks(workers);
  const std::size_t per = trials / workers;
  const std::size_t extra = trials % workers;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t w = 0, begin = 0; w < workers; ++w) {
    const std::size_t len = per + (w < extra ? 1 : 0);
    ranges.emplace_back(begin, begin + len);
    begin += len;
  }

  if (workers == 1) {
    run_chunk(nx, ny, 0, trials, mode, seed, chunks[0]);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        run_chunk(nx, ny, ranges[w].first, ranges[w].second, mode, seed, chunks[w]);
      });
    }
  }

  // Chunks are contiguous and each stops at its first failure, so the lowest
  // failing chunk holds the earliest failure overall.
  for (const auto& chunk : chunks) {
    if (chunk.failure) std::rethrow_exception(chunk.failure);
  }

  TrialReport report;
  report.trials = trials;
  report.seed = seed;
  report.nx = nx;
  report.ny = ny;
  double best = -1.0;
  std::size_t best_trial = 0;
  for (auto& chunk : chunks) {
    report.violations += chunk.violations;
    if (chunk.best_pair &&
        (chunk.best_ratio > best || (chunk.best_ratio == best && chunk.best_trial < best_trial))) {
      best = chunk.best_ratio;
      best_trial = chunk.best_trial;
      report.worst_pair = std::move(chunk.best_pair);
    }
  }
  report.max_gap_over_bound_ratio = std::max(best, 0.0);
  return report;
}

GridSearchResult grid_search_max_gap(std::size_t nx, std::size_t ny, double eps,
                                     std::size_t steps_per_dim) {
  if (nx < 2 || ny < 1) throw DomainError("grid search needs nx >= 2 and ny >= 1");
  if (nx * ny > kGridMaxCells || steps_per_dim > kGridMaxSteps || steps_per_dim == 0) {
    std::ostringstream msg;
    msg << "grid search is limited to nx*ny <= " << kGridMaxCells << " and 1 <= steps <= "
        << kGridMaxSteps;
    throw DomainError(msg.str());
  }
  const double edge = 1.0 - 1.0 / static_cast<double>(nx);
  if (!(eps > 0.0 && eps <= edge + kEdgeTolerance)) throw DomainError("grid search needs 0 < eps <= 1 - 1/nx");

  const std::size_t cells = nx * ny;
  const int total = static_cast<int>(steps_per_dim);
  // Pairs with sum |p - q| <= budget grid units have TV <= eps.
  const int budget = static_cast<int>(std::floor(2.0 * eps * total + 1e-9));

  // eta_table[k] = (k/N) log2(k/N), so H(X|Y) needs only table lookups:
  // H(X|Y) = sum_j eta(p_Y(j)) - sum_ij eta(p(i, j)).
  std::vector<double> eta_table(steps_per_dim + 1);
  for (std::size_t k = 0; k <= steps_per_dim; ++k) {
    eta_table[k] = eta(static_cast<double>(k) / total);
  }
  const auto equivocation_of = [&](const std::vector<int>& counts) {
    double h = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      int block = 0;
      for (std::size_t i = 0; i < nx; ++i) {
        const int c = counts[j * nx + i];
        block += c;
        h -= eta_table[static_cast<std::size_t>(c)];
      }
      h += eta_table[static_cast<std::size_t>(block)];
    }
    return h;
  };

  double best_gap = -1.0;
  std::vector<int> best_p(cells);
  std::vector<int> best_q(cells);

  std::vector<int> p(cells, 0);
  std::vector<int> q(cells, 0);
  double hp = 0.0;

  // Enumerate q within the l1 ball around p, pruning on the mass that the
  // remaining coordinates must still shift.
  auto walk_q = [&](auto&& self, std::size_t k, int used, int l1, int drift) -> void {
    if (k + 1 == cells) {
      const int last = total - used;
      const int dist = l1 + std::abs(last - p[k]);
      if (dist > budget) return;
      q[k] = last;
      const double gap = std::abs(hp - equivocation_of(q));
      if (gap > best_gap) {
        best_gap = gap;
        best_p = p;
        best_q = q;
      }
      return;
    }
    const int lo = std::max(0, p[k] - (budget - l1));
    const int hi = std::min(total - used, p[k] + (budget - l1));
    for (int v = lo; v <= hi; ++v) {
      const int d = v - p[k];
      const int next_l1 = l1 + std::abs(d);
      const int next_drift = drift + d;
      if (next_l1 + std::abs(next_drift) > budget) continue;
      q[k] = v;
      self(self, k + 1, used + v, next_l1, next_drift);
    }
  };

  auto walk_p = [&](auto&& self, std::size_t k, int used) -> void {
    if (k + 1 == cells) {
      p[k] = total - used;
      hp = equivocation_of(p);
      walk_q(walk_q, 0, 0, 0, 0);
      return;
    }
    for (int v = 0; v <= total - used; ++v) {
      p[k] = v;
      self(self, k + 1, used + v);
    }
  };
  walk_p(walk_p, 0, 0);

  const auto to_joint = [&](const std::vector<int>& counts) {
    std::vector<double> values(cells);
    for (std::size_t k = 0; k < cells; ++k) values[k] = static_cast<double>(counts[k]) / total;
    return JointDistribution(nx, ny, std::move(values));
  };
  DistributionPair argmax(to_joint(best_p), to_joint(best_q));
  const double gap =
      std::abs(conditional_entropy(argmax.p) - conditional_entropy(argmax.q));
  return {gap, continuity_bound(eps, nx).value, std::move(argmax)};
}

}  // namespace equivocation

#include "equivocation/joint_distribution.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "equivocation/errors.hpp"

namespace equivocation {

JointDistribution::JointDistribution(std::size_t nx, std::size_t ny,
                                     std::vector<double> block_major)
    : nx_(nx), ny_(ny), values_(std::move(block_major)) {
  if (nx_ == 0 || ny_ == 0) {
    throw DomainError("joint distribution needs nx >= 1 and ny >= 1");
  }
  if (values_.size() != nx_ * ny_) {
    std::ostringstream msg;
    msg << "expected " << nx_ * ny_ << " entries, got " << values_.size();
    throw ShapeMismatch(msg.str());
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    double& v = values_[k];
    if (!std::isfinite(v) || v < -kClampTolerance) {
      std::ostringstream msg;
      msg << "entry (" << k % nx_ + 1 << ", " << k / nx_ + 1 << ") = " << v
          << " is not a probability";
      throw DomainError(msg.str());
    }
    if (v < 0.0) v = 0.0;
  }
  const double mass = total_mass();
  if (std::abs(mass - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "total mass " << mass << " differs from 1";
    throw DomainError(msg.str());
  }
}

JointDistribution JointDistribution::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t nx = rows.size();
  const std::size_t ny = nx == 0 ? 0 : rows.front().size();
  std::vector<double> values(nx * ny);
  for (std::size_t i = 0; i < nx; ++i) {
    if (rows[i].size() != ny) throw ShapeMismatch("ragged rows");
    for (std::size_t j = 0; j < ny; ++j) values[j * nx + i] = rows[i][j];
  }
  return JointDistribution(nx, ny, std::move(values));
}

JointDistribution JointDistribution::point_mass(std::size_t nx, std::size_t ny, std::size_t i,
                                                std::size_t j) {
  if (i >= nx || j >= ny) throw DomainError("point mass outside the grid");
  std::vector<double> values(nx * ny, 0.0);
  values[j * nx + i] = 1.0;
  return JointDistribution(nx, ny, std::move(values));
}

JointDistribution JointDistribution::uniform(std::size_t nx, std::size_t ny) {
  const double w = 1.0 / static_cast<double>(nx * ny);
  return JointDistribution(nx, ny, std::vector<double>(nx * ny, w));
}

std::vector<std::vector<double>> JointDistribution::rows() const {
  std::vector<std::vector<double>> out(nx_, std::vector<double>(ny_));
  for (std::size_t i = 0; i < nx_; ++i)
    for (std::size_t j = 0; j < ny_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

double JointDistribution::total_mass() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

DistributionPair::DistributionPair(JointDistribution p_, JointDistribution q_)
    : p(std::move(p_)), q(std::move(q_)) {
  if (p.nx() != q.nx() || p.ny() != q.ny()) {
    throw ShapeMismatch("pair components have different shapes");
  }
}

}  // namespace equivocation

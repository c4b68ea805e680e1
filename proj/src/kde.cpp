#include "gcrl/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gcrl {

namespace {

std::size_t common_dim(std::span<const Goal> goals) {
  if (goals.empty()) throw Error("empty goal buffer");
  const std::size_t d = goals.front().dim();
  if (d == 0) throw ContractViolation("kde: zero-dimensional goal");
  for (const auto& g : goals) {
    if (g.dim() != d) throw ContractViolation("kde: goals of mixed dimension");
    require_finite(g.coords, "kde sample");
  }
  return d;
}

}  // namespace

double scott_bandwidth(std::span<const Goal> goals) {
  const std::size_t d = common_dim(goals);
  const std::size_t n = goals.size();
  double sigma = 0.0;
  if (n > 1) {
    for (std::size_t k = 0; k < d; ++k) {
      double mean = 0.0;
      for (const auto& g : goals) mean += g[k];
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (const auto& g : goals) ss += (g[k] - mean) * (g[k] - mean);
      sigma += std::sqrt(ss / static_cast<double>(n - 1));
    }
    sigma /= static_cast<double>(d);
  }
  const double h = sigma * std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 4.0));
  return std::max(h, DensityModel::kBandwidthFloor);
}

DensityModel DensityModel::fit(std::span<const Goal> goals) {
  return DensityModel(goals, scott_bandwidth(goals));
}

DensityModel DensityModel::with_bandwidth(std::span<const Goal> goals, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ContractViolation("kde: bandwidth must be positive");
  }
  return DensityModel(goals, bandwidth);
}

DensityModel::DensityModel(std::span<const Goal> goals, double bandwidth)
    : dim_(common_dim(goals)), bandwidth_(bandwidth) {
  samples_.reserve(goals.size() * dim_);
  for (const auto& g : goals) samples_.insert(samples_.end(), g.coords.begin(), g.coords.end());
  const double d = static_cast<double>(dim_);
  log_norm_const_ = -0.5 * d * std::log(2.0 * std::numbers::pi * bandwidth_ * bandwidth_);
  norm_const_ = std::exp(log_norm_const_);
  inv_two_h2_ = 1.0 / (2.0 * bandwidth_ * bandwidth_);
}

double DensityModel::squared_distance(const Goal& g, std::size_t j) const {
  const double* x = samples_.data() + j * dim_;
  double sq = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    const double diff = g[k] - x[k];
    sq += diff * diff;
  }
  return sq;
}

double DensityModel::density(const Goal& g) const {
  if (g.dim() != dim_) throw ContractViolation("kde: query dimension mismatch");
  require_finite(g.coords, "kde query");
  const std::size_t n = size();
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += std::exp(-squared_distance(g, j) * inv_two_h2_);
  return norm_const_ * sum / static_cast<double>(n);
}

double DensityModel::log_density(const Goal& g) const {
  if (g.dim() != dim_) throw ContractViolation("kde: query dimension mismatch");
  require_finite(g.coords, "kde query");
  const std::size_t n = size();
  double max_exponent = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    max_exponent = std::max(max_exponent, -squared_distance(g, j) * inv_two_h2_);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sum += std::exp(-squared_distance(g, j) * inv_two_h2_ - max_exponent);
  }
  return log_norm_const_ + max_exponent + std::log(sum) - std::log(static_cast<double>(n));
}

}  // namespace gcrl

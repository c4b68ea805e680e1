#pragma once

#include <span>
#include <vector>

#include "gcrl/core.hpp"

namespace gcrl {

/// Isotropic Gaussian kernel density estimate over a set of goals.
///
/// The model owns a copy of its samples, so mutating the buffer it was fit on
/// does not affect it. Immutable after construction; concurrent reads are safe.
class DensityModel {
 public:
  /// Bandwidth used when the samples have zero spread.
  static constexpr double kBandwidthFloor = 1e-3;

  /// Fits with Scott's rule h = sigma * n^(-1/(d+4)), where sigma is the mean
  /// of the per-dimension sample standard deviations. Throws Error on an
  /// empty input and ContractViolation on mixed dimensions.
  static DensityModel fit(std::span<const Goal> goals);

  /// Same as fit() but with an explicit bandwidth.
  static DensityModel with_bandwidth(std::span<const Goal> goals, double bandwidth);

  double density(const Goal& g) const;
  /// ln(density(g)) via log-sum-exp; finite far from the samples where
  /// density() underflows to zero.
  double log_density(const Goal& g) const;

  double bandwidth() const { return bandwidth_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return samples_.size() / dim_; }
  /// Kernel normalizer (2*pi*h^2)^(-d/2).
  double norm_const() const { return norm_const_; }

 private:
  DensityModel(std::span<const Goal> goals, double bandwidth);

  double squared_distance(const Goal& g, std::size_t j) const;

  std::vector<double> samples_;  // row-major, size() x dim()
  std::size_t dim_ = 0;
  double bandwidth_ = 0.0;
  double norm_const_ = 0.0;
  double log_norm_const_ = 0.0;
  double inv_two_h2_ = 0.0;
};

/// Scott's-rule bandwidth for `goals`, floored at kBandwidthFloor.
double scott_bandwidth(std::span<const Goal> goals);

}  // namespace gcrl

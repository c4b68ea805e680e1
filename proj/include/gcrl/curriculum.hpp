#pragma once

#include <span>
#include <vector>

#include "gcrl/core.hpp"
#include "gcrl/kde.hpp"

namespace gcrl {

struct CurriculumConfig {
  int select_size = 256;     // |B_ag|
  int augment_size = 128;    // |B_aug|
  int pool_size = 100;       // top-ranked exploration goals kept
  double aug_radius = 0.03;  // radius of the augmentation ball
  double alpha = 0.5;        // explore ratio

  /// Throws ConfigError when the sizes or radii are inconsistent. The
  /// augmentation radius may not exceed the reward tolerance `delta`.
  void validate(double delta) const;
};

/// Sampling weights over an achieved-goal buffer: raw densities, their
/// min-shifted normalization, and the inverted softmax probabilities.
struct PriorityWeights {
  std::vector<double> raw;
  std::vector<double> normalized;
  std::vector<double> probs;
};

struct CurriculumBatch {
  PriorityWeights ag_weights;   // priorities over the achieved-goal buffer
  std::vector<Goal> selected;   // B_ag
  std::vector<Goal> augmented;  // B_aug
  std::vector<Goal> ranked;     // selected ++ augmented, sorted by normalized entropy
  std::vector<double> entropies;  // aligned with `ranked`
  std::vector<double> batch_probs;  // desired-density batch probability, aligned with `ranked`
  std::vector<Goal> pool;       // first pool_size entries of `ranked`

  /// selected ++ augmented in insertion order.
  std::vector<Goal> candidates() const;
};

/// Goal-replacement probability schedule eps = alpha * exp(-2 * p_s).
struct ExploreSchedule {
  double alpha = 0.5;
  double last_success_rate = 0.0;

  double epsilon() const;
};

/// Densities below this total spread are treated as all-equal.
inline constexpr double kDegenerateSpread = 1e-12;

/// Priorities from precomputed densities. Low density -> high probability.
PriorityWeights priorities_from_densities(std::vector<double> raw);

/// Inverted softmax p_i = exp(1 - n_i) / sum_j exp(1 - n_j) over normalized
/// densities.
std::vector<double> inverted_softmax(std::span<const double> normalized);

PriorityWeights density_priorities(std::span<const Goal> ag_buffer, const DensityModel& model);

/// k categorical draws with replacement.
std::vector<Goal> sample_achieved(std::span<const Goal> ag_buffer, const PriorityWeights& weights,
                                  int k, Rng& rng);

/// `cfg.augment_size` goals, each uniform in the open ball of radius
/// `cfg.aug_radius` around a base drawn uniformly from `selected`. When
/// `bases` is non-null it receives the base index of every output.
std::vector<Goal> augment_goals(std::span<const Goal> selected, const CurriculumConfig& cfg,
                                Rng& rng, std::vector<std::size_t>* bases = nullptr);

struct RankedGoals {
  std::vector<Goal> goals;
  std::vector<double> entropies;
  std::vector<double> probs;       // batch probability of each ranked goal
  std::vector<std::size_t> order;  // original index of each ranked goal
};

/// Ranks candidates by normalized element-wise entropy of their batch
/// probability under the desired-goal model, highest first (stable).
RankedGoals entropy_rank(std::span<const Goal> candidates, const DensityModel& desired_model);

/// Same ranking from log-densities of the candidates.
RankedGoals entropy_rank_from_log_densities(std::span<const Goal> candidates,
                                            std::span<const double> log_q);

/// Same ranking from plain densities (must be >= 0, not all zero).
RankedGoals entropy_rank_from_densities(std::span<const Goal> candidates,
                                        std::span<const double> q);

CurriculumBatch build_batch(std::span<const Goal> ag_buffer, const DensityModel& ag_model,
                            const DensityModel& dg_model, const CurriculumConfig& cfg, Rng& rng);

double epsilon(const ExploreSchedule& schedule);

/// With probability eps draws uniformly from `batch.pool`; otherwise returns
/// `env_goal`. An empty pool always returns `env_goal`.
Goal maybe_replace_goal(const Goal& env_goal, const CurriculumBatch& batch,
                        const ExploreSchedule& schedule, Rng& rng, bool* replaced = nullptr);

}  // namespace gcrl

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "gcrl/core.hpp"
#include "gcrl/curriculum.hpp"

namespace gcrl {

using GoalMap = std::function<Goal(const State&)>;

/// FIFO ring of goals feeding the density models.
class GoalBuffer {
 public:
  explicit GoalBuffer(std::size_t capacity = 1000);

  void push(Goal g);
  std::size_t size() const { return goals_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return goals_.empty(); }
  /// Oldest first.
  std::vector<Goal> goals() const { return {goals_.begin(), goals_.end()}; }
  /// Number of pairwise-distinct goals, capped at `limit`.
  std::size_t distinct_count(std::size_t limit = 2) const;

 private:
  std::size_t capacity_;
  std::deque<Goal> goals_;
};

/// Trajectory-granular transition store. Capacity is counted in transitions;
/// whole trajectories are evicted oldest first.
class TransitionBuffer {
 public:
  explicit TransitionBuffer(std::size_t capacity = 1'000'000);

  void push(const Trajectory& traj);

  std::size_t size() const { return transitions_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t trajectory_count() const { return episodes_.size(); }
  bool empty() const { return episodes_.empty(); }
  int horizon() const { return horizon_; }

  /// Reassembles transition `t` of stored trajectory `episode` (0 = oldest).
  Transition transition(std::size_t episode, std::size_t t) const;
  /// Achieved goal after step `t` of trajectory `episode`.
  Goal achieved_goal(std::size_t episode, std::size_t t) const;
  Goal desired_goal(std::size_t episode) const;

 private:
  struct Stored {
    std::vector<double> states;    // (T + 1) x d_s
    std::vector<double> actions;   // T x d_a
    std::vector<double> achieved;  // T x d_g
    std::vector<double> desired;   // d_g
  };

  std::size_t capacity_;
  std::size_t transitions_ = 0;
  int horizon_ = 0;
  EnvDims dims_{};
  std::deque<Stored> episodes_;
};

enum class RelabelStrategy { Future };

struct RelabelSpec {
  RelabelStrategy strategy = RelabelStrategy::Future;
  int replay_k = 4;

  /// Target fraction of relabeled transitions, k / (k + 1).
  double relabel_fraction() const;
};

/// Appends `traj` to `buf`, its per-step achieved goals to `ag_buf`, and its
/// environment goal to `dg_buf`.
void store_trajectory(TransitionBuffer& buf, GoalBuffer& ag_buf, GoalBuffer& dg_buf,
                      const Trajectory& traj);

/// A sampled transition plus bookkeeping used by tests and counters.
struct SampledTransition {
  Transition transition;
  bool relabeled = false;
  std::size_t episode = 0;
  std::size_t step = 0;
  std::size_t future_step = 0;  // source step of the relabel goal when relabeled
};

/// Hindsight batch with the future strategy. Transitions are drawn uniformly;
/// those with at least one later step are relabeled with a probability chosen
/// so that the overall relabeled fraction equals spec.relabel_fraction().
/// Rewards are always recomputed against goal_map(next_state).
std::vector<SampledTransition> sample_her_batch_detailed(const TransitionBuffer& buf,
                                                         const RelabelSpec& spec,
                                                         const RewardSpec& reward_spec,
                                                         const GoalMap& goal_map, int batch,
                                                         Rng& rng);

std::vector<Transition> sample_her_batch(const TransitionBuffer& buf, const RelabelSpec& spec,
                                         const RewardSpec& reward_spec, const GoalMap& goal_map,
                                         int batch, Rng& rng);

/// Uniform transitions paired with goals drawn uniformly from
/// selected ++ augmented, rewards recomputed.
std::vector<Transition> augment_transitions(const TransitionBuffer& buf,
                                            const CurriculumBatch& goals,
                                            const RewardSpec& reward_spec,
                                            const GoalMap& goal_map, int batch, Rng& rng);

/// Concatenation of both batches, shuffled.
std::vector<Transition> compose_update_batch(std::vector<Transition> her,
                                             std::vector<Transition> aug, Rng& rng);

}  // namespace gcrl

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gcrl/agent.hpp"
#include "gcrl/config.hpp"
#include "gcrl/curriculum.hpp"
#include "gcrl/logging.hpp"
#include "gcrl/replay.hpp"

namespace gcrl {

using Policy = std::function<Action(const State&, const Goal&)>;
/// Maps the environment's goal to the goal the episode is run under.
using GoalChooser = std::function<Goal(const Goal&)>;

/// Runs one full-horizon episode from env.reset(reset_seed). Rewards are
/// computed against the chosen goal.
Trajectory rollout(Env& env, std::uint64_t reset_seed, const Policy& policy,
                   const GoalChooser& choose_goal = {});

/// Fraction of episodes whose final step is within tolerance of the
/// environment's own goal. Episode j resets with a seed derived from
/// (seed, j).
double evaluate(const Policy& policy, Env& env, int episodes, std::uint64_t seed);
double evaluate(const DdpgAgent& agent, Env& env, int episodes, std::uint64_t seed);

/// How often each optional code path ran; used to check that ablation flags
/// switch exactly their own module.
struct TrainerCounters {
  long long kde_fits = 0;
  long long curriculum_batches = 0;
  long long augmented_goals = 0;
  long long replacement_draws = 0;
  long long goal_replacements = 0;
  long long her_batches = 0;
  long long trans_aug_batches = 0;
  long long updates = 0;
  long long warmup_epochs = 0;

  bool operator==(const TrainerCounters&) const = default;
};

/// Owns the agent, buffers and schedule of one training run.
class Trainer {
 public:
  explicit Trainer(RunConfig cfg);

  /// Collect, update, evaluate. Errors are rethrown as Error prefixed with
  /// the epoch index.
  EpochReport run_epoch();
  /// Remaining epochs up to cfg.epochs; `on_epoch` sees each report.
  const std::vector<EpochReport>& run(const std::function<void(const EpochReport&)>& on_epoch = {});

  const RunConfig& config() const { return cfg_; }
  const DdpgAgent& agent() const { return agent_; }
  DdpgAgent& agent() { return agent_; }
  const Env& env() const { return *env_; }
  const TransitionBuffer& transitions() const { return buffer_; }
  const GoalBuffer& achieved_goals() const { return ag_buffer_; }
  const GoalBuffer& desired_goals() const { return dg_buffer_; }
  const ExploreSchedule& schedule() const { return schedule_; }
  const TrainerCounters& counters() const { return counters_; }
  const std::vector<EpochReport>& reports() const { return reports_; }
  /// Curriculum batch of the last epoch, if one was built.
  const std::optional<CurriculumBatch>& last_batch() const { return last_batch_; }
  int epoch() const { return epoch_; }

 private:
  EpochReport run_epoch_impl();
  std::vector<Trajectory> collect(const CurriculumBatch* batch);

  RunConfig cfg_;
  std::unique_ptr<Env> env_;
  DdpgAgent agent_;
  TransitionBuffer buffer_;
  GoalBuffer ag_buffer_;
  GoalBuffer dg_buffer_;
  ExploreSchedule schedule_;
  TrainerCounters counters_;
  std::vector<EpochReport> reports_;
  std::optional<CurriculumBatch> last_batch_;
  int epoch_ = 0;
  long long episodes_ = 0;
};

/// Mean test success over the last `window` reports.
double final_success(const std::vector<EpochReport>& reports, int window = 5);

/// Writes progress.csv and learning_curve.svg into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const std::vector<EpochReport>& reports,
                       const std::string& label);

}  // namespace gcrl

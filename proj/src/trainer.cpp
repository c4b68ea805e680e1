#include "gcrl/trainer.hpp"

#include <chrono>
#include <thread>

#include "gcrl/envs.hpp"
#include "gcrl/kde.hpp"

namespace gcrl {

namespace {

// Stream identifiers for make_rng; every random decision in a run draws from
// one of these, keyed by epoch and episode so results do not depend on how
// collection is split across workers.
enum Stream : std::uint64_t {
  kAgentInit = 1,
  kCollectReset = 10,
  kCollectAction = 11,
  kCollectGoal = 12,
  kEvalReset = 20,
  kCurriculum = 30,
  kUpdates = 40,
};

std::uint64_t derived_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> streams) {
  Rng rng = make_rng(seed, streams);
  return rng();
}

}  // namespace

Trajectory rollout(Env& env, std::uint64_t reset_seed, const Policy& policy,
                   const GoalChooser& choose_goal) {
  auto [state, env_goal] = env.reset(reset_seed);
  Trajectory traj;
  traj.env_goal = env_goal;
  traj.desired_goal = choose_goal ? choose_goal(env_goal) : env_goal;
  const RewardSpec spec = env.reward_spec();
  const int T = env.horizon();
  traj.transitions.reserve(static_cast<std::size_t>(T));
  traj.achieved_goals.reserve(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    Action action = policy(state, traj.desired_goal);
    State next = env.step(action);
    Goal achieved = env.goal_map(next);
    const double reward = sparse_reward(achieved, traj.desired_goal, spec);
    traj.transitions.push_back({std::move(state), std::move(action), traj.desired_goal, reward, next});
    traj.achieved_goals.push_back(std::move(achieved));
    state = std::move(next);
  }
  return traj;
}

double evaluate(const Policy& policy, Env& env, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ContractViolation("evaluate: episodes must be >= 1");
  int successes = 0;
  for (int j = 0; j < episodes; ++j) {
    const Trajectory traj = rollout(env, derived_seed(seed, {static_cast<std::uint64_t>(j)}), policy);
    if (sparse_reward(traj.achieved_goals.back(), traj.env_goal, env.reward_spec()) == 0.0) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(episodes);
}

double evaluate(const DdpgAgent& agent, Env& env, int episodes, std::uint64_t seed) {
  Rng unused(0);
  const Policy policy = [&](const State& s, const Goal& g) {
    return agent.select_action(s, g, false, unused);
  };
  return evaluate(policy, env, episodes, seed);
}

Trainer::Trainer(RunConfig cfg)
    : cfg_(std::move(cfg)),
      env_((cfg_.validate(), make_env(cfg_.env))),
      agent_(env_->dims(), cfg_.agent, derived_seed(cfg_.seed, {kAgentInit})),
      buffer_(cfg_.transition_capacity),
      ag_buffer_(cfg_.goal_buffer_capacity),
      dg_buffer_(cfg_.goal_buffer_capacity) {
  if (!cfg_.goal_augmentation) cfg_.curriculum.augment_size = 0;
  cfg_.curriculum.pool_size =
      std::min(cfg_.curriculum.pool_size, cfg_.curriculum.select_size + cfg_.curriculum.augment_size);
  schedule_.alpha = cfg_.curriculum.alpha;
  schedule_.last_success_rate = 0.0;
}

std::vector<Trajectory> Trainer::collect(const CurriculumBatch* batch) {
  const int n = cfg_.episodes_per_epoch;
  std::vector<Trajectory> out(static_cast<std::size_t>(n));
  std::vector<char> replaced(static_cast<std::size_t>(n), 0);
  const std::uint64_t e = static_cast<std::uint64_t>(epoch_);

  auto run_range = [&](int begin, int end) {
    std::unique_ptr<Env> env = env_->clone();
    for (int i = begin; i < end; ++i) {
      const std::uint64_t ep = static_cast<std::uint64_t>(i);
      Rng action_rng = make_rng(cfg_.seed, {kCollectAction, e, ep});
      Rng goal_rng = make_rng(cfg_.seed, {kCollectGoal, e, ep});
      const Policy policy = [&](const State& s, const Goal& g) {
        return agent_.select_action(s, g, true, action_rng);
      };
      GoalChooser chooser;
      if (batch) {
        chooser = [&](const Goal& env_goal) {
          bool hit = false;
          Goal g = maybe_replace_goal(env_goal, *batch, schedule_, goal_rng, &hit);
          replaced[static_cast<std::size_t>(i)] = hit ? 1 : 0;
          return g;
        };
      }
      out[static_cast<std::size_t>(i)] =
          rollout(*env, derived_seed(cfg_.seed, {kCollectReset, e, ep}), policy, chooser);
    }
  };

  const int workers = std::min(cfg_.workers, n);
  if (workers <= 1) {
    run_range(0, n);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      const int begin = n * w / workers;
      const int end = n * (w + 1) / workers;
      threads.emplace_back([&, w, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  if (batch) {
    counters_.replacement_draws += n;
    for (char r : replaced) counters_.goal_replacements += r;
  }
  return out;
}

EpochReport Trainer::run_epoch() {
  try {
    return run_epoch_impl();
  } catch (const std::exception& ex) {
    throw Error("epoch " + std::to_string(epoch_) + ": " + ex.what());
  }
}

EpochReport Trainer::run_epoch_impl() {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t e = static_cast<std::uint64_t>(epoch_);
  const RewardSpec reward_spec = env_->reward_spec();
  const GoalMap goal_map = [this](const State& s) { return env_->goal_map(s); };

  // (1)-(2) density models and curriculum batch, once both buffers can
  // support a KDE.
  last_batch_.reset();
  const bool ready = ag_buffer_.distinct_count(2) >= 2 && dg_buffer_.distinct_count(2) >= 2;
  if (cfg_.any_curriculum() && ready) {
    const std::vector<Goal> ag = ag_buffer_.goals();
    const std::vector<Goal> dg = dg_buffer_.goals();
    const DensityModel ag_model = DensityModel::fit(ag);
    const DensityModel dg_model = DensityModel::fit(dg);
    counters_.kde_fits += 2;
    Rng rng = make_rng(cfg_.seed, {kCurriculum, e});
    last_batch_ = build_batch(ag, ag_model, dg_model, cfg_.curriculum, rng);
    ++counters_.curriculum_batches;
    counters_.augmented_goals += static_cast<long long>(last_batch_->augmented.size());
    if (cfg_.dump_goals && !cfg_.out_dir.empty()) {
      const auto path = std::filesystem::path(cfg_.out_dir) / "curriculum_goals.csv";
      append_goal_dump(path, epoch_, "selected", last_batch_->selected);
      append_goal_dump(path, epoch_, "augmented", last_batch_->augmented);
      append_goal_dump(path, epoch_, "pool", last_batch_->pool);
    }
  } else if (cfg_.any_curriculum()) {
    ++counters_.warmup_epochs;
  }

  // (3)-(4) collection and storage.
  const CurriculumBatch* explore_batch =
      cfg_.goal_exploration && last_batch_ ? &*last_batch_ : nullptr;
  const std::vector<Trajectory> episodes = collect(explore_batch);
  std::vector<State> norm_states;
  std::vector<Goal> norm_goals;
  for (const auto& traj : episodes) {
    store_trajectory(buffer_, ag_buffer_, dg_buffer_, traj);
    for (std::size_t t = 0; t < traj.length(); ++t) {
      norm_states.push_back(traj.transitions[t].state);
      norm_goals.push_back(traj.desired_goal);
      norm_goals.push_back(traj.achieved_goals[t]);
    }
  }
  agent_.update_normalizer(norm_states, norm_goals);
  episodes_ += static_cast<long long>(episodes.size());

  // (5) optimization.
  const bool trans_aug = cfg_.trans_augmentation && last_batch_.has_value() && cfg_.aug_batch > 0;
  Rng rng = make_rng(cfg_.seed, {kUpdates, e});
  double critic_sum = 0.0;
  double actor_sum = 0.0;
  for (int u = 0; u < cfg_.n_updates; ++u) {
    std::vector<Transition> her =
        sample_her_batch(buffer_, cfg_.relabel, reward_spec, goal_map, cfg_.her_batch, rng);
    ++counters_.her_batches;
    std::vector<Transition> aug;
    if (trans_aug) {
      aug = augment_transitions(buffer_, *last_batch_, reward_spec, goal_map, cfg_.aug_batch, rng);
      ++counters_.trans_aug_batches;
    }
    const std::vector<Transition> batch = compose_update_batch(std::move(her), std::move(aug), rng);
    const UpdateReport r = agent_.update(batch);
    ++counters_.updates;
    critic_sum += r.critic_loss;
    actor_sum += r.actor_loss;
  }

  // (6) evaluation on the environment's own goals.
  const double success =
      evaluate(agent_, *env_, cfg_.eval_episodes, derived_seed(cfg_.seed, {kEvalReset, e}));

  // (7) report; epsilon is the value that governed this epoch's collection.
  EpochReport report;
  report.epoch = epoch_;
  report.episodes = episodes_;
  report.success_rate = success;
  report.critic_loss = critic_sum / cfg_.n_updates;
  report.actor_loss = actor_sum / cfg_.n_updates;
  report.epsilon = cfg_.goal_exploration ? schedule_.epsilon() : 0.0;
  if (cfg_.timing) {
    report.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  schedule_.last_success_rate = success;
  reports_.push_back(report);
  ++epoch_;
  return report;
}

const std::vector<EpochReport>& Trainer::run(const std::function<void(const EpochReport&)>& on_epoch) {
  while (epoch_ < cfg_.epochs) {
    const EpochReport r = run_epoch();
    if (on_epoch) on_epoch(r);
  }
  return reports_;
}

double final_success(const std::vector<EpochReport>& reports, int window) {
  if (reports.empty()) throw ContractViolation("final_success: no reports");
  if (window < 1) throw ContractViolation("final_success: window must be >= 1");
  const std::size_t n = std::min(reports.size(), static_cast<std::size_t>(window));
  double sum = 0.0;
  for (std::size_t i = reports.size() - n; i < reports.size(); ++i) sum += reports[i].success_rate;
  return sum / static_cast<double>(n);
}

void write_run_outputs(const std::filesystem::path& dir, const std::vector<EpochReport>& reports,
                       const std::string& label) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
  write_progress_csv(reports, dir / "progress.csv");
  write_learning_curve_svg({success_series(reports, label)}, label, dir / "learning_curve.svg");
}

}  // namespace gcrl

#include "gcrl/replay.hpp"

#include <algorithm>

namespace gcrl {

GoalBuffer::GoalBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("goal buffer capacity must be >= 1");
}

void GoalBuffer::push(Goal g) {
  require_finite(g.coords, "goal buffer");
  if (goals_.size() == capacity_) goals_.pop_front();
  goals_.push_back(std::move(g));
}

std::size_t GoalBuffer::distinct_count(std::size_t limit) const {
  std::vector<const Goal*> seen;
  for (const auto& g : goals_) {
    const bool fresh = std::none_of(seen.begin(), seen.end(), [&](const Goal* s) { return *s == g; });
    if (fresh) {
      seen.push_back(&g);
      if (seen.size() >= limit) break;
    }
  }
  return seen.size();
}

TransitionBuffer::TransitionBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("transition buffer capacity must be >= 1");
}

void TransitionBuffer::push(const Trajectory& traj) {
  const std::size_t T = traj.length();
  if (T == 0) throw ContractViolation("store: empty trajectory");
  if (traj.achieved_goals.size() != T) {
    throw ContractViolation("store: achieved goal count does not match trajectory length");
  }
  if (T > capacity_) throw ContractViolation("store: trajectory longer than buffer capacity");
  const EnvDims dims{traj.transitions.front().state.dim(), traj.transitions.front().action.dim(),
                     traj.desired_goal.dim()};
  if (episodes_.empty()) {
    horizon_ = static_cast<int>(T);
    dims_ = dims;
  } else if (static_cast<int>(T) != horizon_ || dims.state != dims_.state ||
             dims.action != dims_.action || dims.goal != dims_.goal) {
    throw ContractViolation("store: trajectory shape differs from buffer contents");
  }

  Stored s;
  s.states.reserve((T + 1) * dims.state);
  s.actions.reserve(T * dims.action);
  s.achieved.reserve(T * dims.goal);
  for (std::size_t t = 0; t < T; ++t) {
    const Transition& tr = traj.transitions[t];
    if (tr.state.dim() != dims.state || tr.next_state.dim() != dims.state ||
        tr.action.dim() != dims.action || tr.goal != traj.desired_goal ||
        traj.achieved_goals[t].dim() != dims.goal) {
      throw ContractViolation("store: malformed transition");
    }
    if (t > 0 && tr.state != traj.transitions[t - 1].next_state) {
      throw ContractViolation("store: transitions are not contiguous");
    }
    s.states.insert(s.states.end(), tr.state.values.begin(), tr.state.values.end());
    s.actions.insert(s.actions.end(), tr.action.values.begin(), tr.action.values.end());
    s.achieved.insert(s.achieved.end(), traj.achieved_goals[t].coords.begin(),
                      traj.achieved_goals[t].coords.end());
  }
  const auto& last = traj.transitions.back().next_state.values;
  s.states.insert(s.states.end(), last.begin(), last.end());
  s.desired = traj.desired_goal.coords;

  while (!episodes_.empty() && transitions_ + T > capacity_) {
    episodes_.pop_front();
    transitions_ -= static_cast<std::size_t>(horizon_);
  }
  episodes_.push_back(std::move(s));
  transitions_ += T;
}

Transition TransitionBuffer::transition(std::size_t episode, std::size_t t) const {
  const Stored& s = episodes_.at(episode);
  const std::size_t ds = dims_.state;
  const std::size_t da = dims_.action;
  const auto state_at = [&](std::size_t k) {
    return State(std::vector<double>(s.states.begin() + static_cast<std::ptrdiff_t>(k * ds),
                                     s.states.begin() + static_cast<std::ptrdiff_t>((k + 1) * ds)));
  };
  Transition tr;
  tr.state = state_at(t);
  tr.next_state = state_at(t + 1);
  tr.action = Action(std::vector<double>(s.actions.begin() + static_cast<std::ptrdiff_t>(t * da),
                                         s.actions.begin() + static_cast<std::ptrdiff_t>((t + 1) * da)));
  tr.goal = Goal(s.desired);
  return tr;
}

Goal TransitionBuffer::achieved_goal(std::size_t episode, std::size_t t) const {
  const Stored& s = episodes_.at(episode);
  const std::size_t dg = dims_.goal;
  return Goal(std::vector<double>(s.achieved.begin() + static_cast<std::ptrdiff_t>(t * dg),
                                  s.achieved.begin() + static_cast<std::ptrdiff_t>((t + 1) * dg)));
}

Goal TransitionBuffer::desired_goal(std::size_t episode) const {
  return Goal(episodes_.at(episode).desired);
}

double RelabelSpec::relabel_fraction() const {
  if (replay_k < 0) throw ContractViolation("replay_k must be >= 0");
  return static_cast<double>(replay_k) / static_cast<double>(replay_k + 1);
}

void store_trajectory(TransitionBuffer& buf, GoalBuffer& ag_buf, GoalBuffer& dg_buf,
                      const Trajectory& traj) {
  buf.push(traj);
  for (const auto& g : traj.achieved_goals) ag_buf.push(g);
  dg_buf.push(traj.env_goal.dim() > 0 ? traj.env_goal : traj.desired_goal);
}

std::vector<SampledTransition> sample_her_batch_detailed(const TransitionBuffer& buf,
                                                         const RelabelSpec& spec,
                                                         const RewardSpec& reward_spec,
                                                         const GoalMap& goal_map, int batch,
                                                         Rng& rng) {
  if (buf.empty()) throw Error("sample_her_batch: empty transition buffer");
  if (batch < 1) throw ContractViolation("sample_her_batch: batch must be >= 1");
  const std::size_t T = static_cast<std::size_t>(buf.horizon());
  // Only steps t < T-1 have a later achieved goal; boost their relabel
  // probability so the batch-level fraction still hits the target.
  double p_future = 0.0;
  if (T > 1) {
    p_future = std::min(1.0, spec.relabel_fraction() * static_cast<double>(T) /
                                 static_cast<double>(T - 1));
  }

  std::uniform_int_distribution<std::size_t> pick_episode(0, buf.trajectory_count() - 1);
  std::uniform_int_distribution<std::size_t> pick_step(0, T - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<SampledTransition> out;
  out.reserve(static_cast<std::size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    SampledTransition s;
    s.episode = pick_episode(rng);
    s.step = pick_step(rng);
    s.transition = buf.transition(s.episode, s.step);
    const std::size_t max_k = T - 1 - s.step;
    if (max_k > 0 && unit(rng) < p_future) {
      std::uniform_int_distribution<std::size_t> pick_k(1, max_k);
      const std::size_t k = pick_k(rng);
      s.future_step = s.step + k - 1;
      s.transition.goal = buf.achieved_goal(s.episode, s.future_step);
      s.relabeled = true;
    }
    s.transition.reward =
        sparse_reward(goal_map(s.transition.next_state), s.transition.goal, reward_spec);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Transition> sample_her_batch(const TransitionBuffer& buf, const RelabelSpec& spec,
                                         const RewardSpec& reward_spec, const GoalMap& goal_map,
                                         int batch, Rng& rng) {
  auto detailed = sample_her_batch_detailed(buf, spec, reward_spec, goal_map, batch, rng);
  std::vector<Transition> out;
  out.reserve(detailed.size());
  for (auto& s : detailed) out.push_back(std::move(s.transition));
  return out;
}

std::vector<Transition> augment_transitions(const TransitionBuffer& buf,
                                            const CurriculumBatch& goals,
                                            const RewardSpec& reward_spec,
                                            const GoalMap& goal_map, int batch, Rng& rng) {
  if (buf.empty()) throw Error("augment_transitions: empty transition buffer");
  const std::size_t n_goals = goals.selected.size() + goals.augmented.size();
  if (n_goals == 0) throw Error("augment_transitions: no curriculum goals");
  if (batch < 0) throw ContractViolation("augment_transitions: batch must be >= 0");

  const std::size_t T = static_cast<std::size_t>(buf.horizon());
  std::uniform_int_distribution<std::size_t> pick_episode(0, buf.trajectory_count() - 1);
  std::uniform_int_distribution<std::size_t> pick_step(0, T - 1);
  std::uniform_int_distribution<std::size_t> pick_goal(0, n_goals - 1);

  std::vector<Transition> out;
  out.reserve(static_cast<std::size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    const std::size_t e = pick_episode(rng);
    const std::size_t t = pick_step(rng);
    Transition tr = buf.transition(e, t);
    const std::size_t gi = pick_goal(rng);
    tr.goal = gi < goals.selected.size() ? goals.selected[gi]
                                         : goals.augmented[gi - goals.selected.size()];
    tr.reward = sparse_reward(goal_map(tr.next_state), tr.goal, reward_spec);
    out.push_back(std::move(tr));
  }
  return out;
}

std::vector<Transition> compose_update_batch(std::vector<Transition> her,
                                             std::vector<Transition> aug, Rng& rng) {
  if (her.empty()) throw ContractViolation("compose_update_batch: empty hindsight batch");
  her.reserve(her.size() + aug.size());
  for (auto& t : aug) her.push_back(std::move(t));
  std::shuffle(her.begin(), her.end(), rng);
  return her;
}

}  // namespace gcrl

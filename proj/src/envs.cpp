#include "gcrl/envs.hpp"

#include <algorithm>
#include <cmath>

namespace gcrl {

namespace {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void require_state(const State& s, std::size_t dim, std::string_view env) {
  if (s.dim() != dim) {
    throw ContractViolation(std::string(env) + ": state dimension mismatch");
  }
}

}  // namespace

// ---------------------------------------------------------------- point_reach

std::pair<State, Goal> PointReach2D::reset(std::uint64_t seed) {
  Rng rng = make_rng(seed, {1});
  pos_ = {uniform(rng, 0.2, 0.8), uniform(rng, 0.2, 0.8)};
  return {observe(), sample_desired_goal(rng)};
}

State PointReach2D::step(const Action& action) {
  const Action a = clip_action(action);
  for (std::size_t i = 0; i < 2; ++i) {
    pos_[i] = std::clamp(pos_[i] + kStepScale * a.values[i], 0.0, 1.0);
  }
  return observe();
}

Goal PointReach2D::goal_map(const State& state) const {
  require_state(state, 2, name());
  return Goal{state.values[0], state.values[1]};
}

Goal PointReach2D::sample_desired_goal(Rng& rng) const {
  const double x = uniform(rng, 0.0, 1.0);
  const double y = uniform(rng, 0.0, 1.0);
  return Goal{x, y};
}

// ------------------------------------------------------------------- push_gap

std::array<double, 2> PushGap2D::constrained_move(std::array<double, 2> p, std::array<double, 2> d) {
  std::array<double, 2> q{std::clamp(p[0] + d[0], 0.0, 1.0), std::clamp(p[1] + d[1], 0.0, 1.0)};
  const bool from_left = p[0] < kWallX;
  const bool to_left = q[0] < kWallX;
  if (from_left == to_left) return q;
  // The path crosses the wall line; it passes only through the gap.
  const double t = (kWallX - p[0]) / (q[0] - p[0]);
  const double y_cross = p[1] + t * (q[1] - p[1]);
  if (y_cross >= kGapLow && y_cross <= kGapHigh) return q;
  q[0] = from_left ? kWallX - kWallMargin : kWallX;
  return q;
}

State PushGap2D::observe() const {
  return State{agent_[0], agent_[1], box_[0], box_[1], box_[0] - agent_[0], box_[1] - agent_[1]};
}

std::pair<State, Goal> PushGap2D::reset(std::uint64_t seed) {
  Rng rng = make_rng(seed, {2});
  agent_ = {uniform(rng, 0.05, 0.2), uniform(rng, 0.3, 0.7)};
  box_ = {uniform(rng, 0.25, 0.35), uniform(rng, 0.3, 0.7)};
  return {observe(), sample_desired_goal(rng)};
}

State PushGap2D::step(const Action& action) {
  const Action a = clip_action(action);
  const std::array<double, 2> before = agent_;
  agent_ = constrained_move(agent_, {kStepScale * a.values[0], kStepScale * a.values[1]});
  const std::array<double, 2> moved{agent_[0] - before[0], agent_[1] - before[1]};
  const double toward = moved[0] * (box_[0] - before[0]) + moved[1] * (box_[1] - before[1]);
  const double gap = std::hypot(box_[0] - agent_[0], box_[1] - agent_[1]);
  if (toward > 0.0 && gap < kContactRadius) box_ = constrained_move(box_, moved);
  return observe();
}

Goal PushGap2D::goal_map(const State& state) const {
  require_state(state, 6, name());
  return Goal{state.values[2], state.values[3]};
}

Goal PushGap2D::sample_desired_goal(Rng& rng) const {
  const double x = uniform(rng, 0.6, 0.95);
  const double y = uniform(rng, 0.05, 0.95);
  return Goal{x, y};
}

// ---------------------------------------------------------------------- throw

State Throw2D::observe() const {
  return State{agent_[0], agent_[1], ball_[0], ball_[1], vel_[0], vel_[1], held_ ? 1.0 : 0.0,
               static_cast<double>(t_) / static_cast<double>(kHorizon)};
}

std::pair<State, Goal> Throw2D::reset(std::uint64_t seed) {
  Rng rng = make_rng(seed, {3});
  agent_ = {uniform(rng, 0.2, 0.4), uniform(rng, 0.3, 0.7)};
  ball_ = agent_;
  vel_ = {0.0, 0.0};
  held_ = true;
  t_ = 0;
  return {observe(), sample_desired_goal(rng)};
}

void Throw2D::integrate(std::array<double, 2>& pos, std::array<double, 2>& vel) {
  const std::array<double, 2> hi{kWorldMaxX, 1.0};
  for (std::size_t i = 0; i < 2; ++i) {
    vel[i] *= 1.0 - kDamping * kDt;
    pos[i] += vel[i] * kDt;
    if (pos[i] < 0.0 || pos[i] > hi[i]) {
      pos[i] = std::clamp(pos[i], 0.0, hi[i]);
      vel[i] = 0.0;
    }
  }
}

void Throw2D::set_ball_in_flight(std::array<double, 2> pos, std::array<double, 2> vel, int t) {
  ball_ = pos;
  vel_ = vel;
  held_ = false;
  t_ = t;
}

State Throw2D::step(const Action& action) {
  const Action a = clip_action(action);
  if (held_) {
    for (std::size_t i = 0; i < 2; ++i) {
      const double hi = i == 0 ? kAgentMaxX : 1.0;
      agent_[i] = std::clamp(agent_[i] + kStepScale * a.values[i], 0.0, hi);
      vel_[i] = kReleaseSpeed * a.values[i];
    }
    ball_ = agent_;
    if (t_ + 1 >= kHoldSteps) held_ = false;
  } else {
    integrate(ball_, vel_);
  }
  ++t_;
  return observe();
}

Goal Throw2D::goal_map(const State& state) const {
  require_state(state, 8, name());
  return Goal{state.values[2], state.values[3]};
}

Goal Throw2D::sample_desired_goal(Rng& rng) const {
  const double x = uniform(rng, kGoalMinX, kGoalMaxX);
  const double y = uniform(rng, kGoalMinY, kGoalMaxY);
  return Goal{x, y};
}

// -------------------------------------------------------------------- factory

const std::vector<std::string>& env_names() {
  static const std::vector<std::string> names{"point_reach", "push_gap", "throw"};
  return names;
}

std::unique_ptr<Env> make_env(std::string_view name) {
  if (name == "point_reach") return std::make_unique<PointReach2D>();
  if (name == "push_gap") return std::make_unique<PushGap2D>();
  if (name == "throw") return std::make_unique<Throw2D>();
  throw ConfigError("unknown environment '" + std::string(name) +
                    "' (expected point_reach, push_gap or throw)");
}

}  // namespace gcrl

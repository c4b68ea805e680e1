#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gcrl/core.hpp"

namespace gcrl {

/// Planar point mass steered by velocity commands. State and goal are the
/// position.
class PointReach2D final : public Env {
 public:
  static constexpr double kStepScale = 0.05;
  static constexpr double kDelta = 0.05;
  static constexpr int kHorizon = 50;

  std::string_view name() const override { return "point_reach"; }
  EnvDims dims() const override { return {2, 2, 2}; }
  RewardSpec reward_spec() const override { return RewardSpec(kDelta); }
  int horizon() const override { return kHorizon; }

  std::pair<State, Goal> reset(std::uint64_t seed) override;
  State step(const Action& action) override;
  Goal goal_map(const State& state) const override;
  Goal sample_desired_goal(Rng& rng) const override;
  std::unique_ptr<Env> clone() const override { return std::make_unique<PointReach2D>(*this); }

  /// Places the agent directly (tests, scripted rollouts).
  void set_position(double x, double y) { pos_ = {x, y}; }

 private:
  State observe() const { return State{pos_[0], pos_[1]}; }

  std::array<double, 2> pos_{0.5, 0.5};
};

/// Agent pushes a box through the gap of a wall that splits the unit square.
///
/// The wall sits at x = kWallX and only the segment y in [kGapLow, kGapHigh]
/// is open; neither body can cross elsewhere. Contact is kinematic: when the
/// agent moves toward the box and ends within kContactRadius of it, the box is
/// displaced by the agent's displacement. State is (agent, box, box - agent);
/// the goal is the box position.
class PushGap2D final : public Env {
 public:
  static constexpr double kStepScale = 0.05;
  static constexpr double kDelta = 0.05;
  static constexpr int kHorizon = 50;
  static constexpr double kWallX = 0.5;
  static constexpr double kGapLow = 0.45;
  static constexpr double kGapHigh = 0.55;
  static constexpr double kContactRadius = 0.06;
  static constexpr double kWallMargin = 1e-6;

  std::string_view name() const override { return "push_gap"; }
  EnvDims dims() const override { return {6, 2, 2}; }
  RewardSpec reward_spec() const override { return RewardSpec(kDelta); }
  int horizon() const override { return kHorizon; }

  std::pair<State, Goal> reset(std::uint64_t seed) override;
  State step(const Action& action) override;
  Goal goal_map(const State& state) const override;
  Goal sample_desired_goal(Rng& rng) const override;
  std::unique_ptr<Env> clone() const override { return std::make_unique<PushGap2D>(*this); }

  void set_positions(std::array<double, 2> agent, std::array<double, 2> box) {
    agent_ = agent;
    box_ = box;
  }
  std::array<double, 2> agent() const { return agent_; }
  std::array<double, 2> box() const { return box_; }

  /// Applies displacement `d` from `p` subject to the unit square and the wall.
  static std::array<double, 2> constrained_move(std::array<double, 2> p, std::array<double, 2> d);

 private:
  State observe() const;

  std::array<double, 2> agent_{0.1, 0.5};
  std::array<double, 2> box_{0.3, 0.5};
};

/// Agent carries a ball for the first kHoldSteps steps; the last action before
/// release sets the ball velocity. Afterwards the ball slides with linear
/// damping. The agent is confined to x <= kAgentMaxX while desired goals lie in
/// x in [kGoalMinX, kGoalMaxX], so goals are reachable only by throwing.
///
/// State: agent (2), ball (2), ball velocity (2), held flag, elapsed fraction.
/// The goal is the ball position.
class Throw2D final : public Env {
 public:
  static constexpr double kStepScale = 0.05;
  static constexpr double kDelta = 0.08;
  static constexpr int kHorizon = 50;
  static constexpr int kHoldSteps = 10;
  static constexpr double kReleaseSpeed = 1.0;  // per-component velocity at |a| = 1
  static constexpr double kDt = 0.1;
  static constexpr double kDamping = 0.5;       // velocity *= (1 - kDamping * kDt) per step
  static constexpr double kAgentMaxX = 1.0;
  static constexpr double kWorldMaxX = 2.0;
  static constexpr double kGoalMinX = 1.2;
  static constexpr double kGoalMaxX = 1.8;
  static constexpr double kGoalMinY = 0.1;
  static constexpr double kGoalMaxY = 0.9;

  std::string_view name() const override { return "throw"; }
  EnvDims dims() const override { return {8, 2, 2}; }
  RewardSpec reward_spec() const override { return RewardSpec(kDelta); }
  int horizon() const override { return kHorizon; }

  std::pair<State, Goal> reset(std::uint64_t seed) override;
  State step(const Action& action) override;
  Goal goal_map(const State& state) const override;
  Goal sample_desired_goal(Rng& rng) const override;
  std::unique_ptr<Env> clone() const override { return std::make_unique<Throw2D>(*this); }

  /// Puts the ball in flight at `pos` with velocity `vel` (tests).
  void set_ball_in_flight(std::array<double, 2> pos, std::array<double, 2> vel, int t);
  /// One damped integration step of a free ball, bounds included.
  static void integrate(std::array<double, 2>& pos, std::array<double, 2>& vel);

 private:
  State observe() const;

  std::array<double, 2> agent_{0.3, 0.5};
  std::array<double, 2> ball_{0.3, 0.5};
  std::array<double, 2> vel_{0.0, 0.0};
  bool held_ = true;
  int t_ = 0;
};

/// Environment by name: point_reach, push_gap, throw. Throws ConfigError for
/// anything else.
std::unique_ptr<Env> make_env(std::string_view name);
const std::vector<std::string>& env_names();

}  // namespace gcrl

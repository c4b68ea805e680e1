#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gcrl/envs.hpp"
#include "gcrl/trainer.hpp"

using namespace gcrl;

namespace {

Action toward(const std::array<double, 2>& from, const std::array<double, 2>& to, double step) {
  return Action{std::clamp((to[0] - from[0]) / step, -1.0, 1.0),
                std::clamp((to[1] - from[1]) / step, -1.0, 1.0)};
}

// Scripted pusher: steer the box through waypoints (gap entry, gap exit,
// goal). Reposition behind the box, then push along the waypoint direction.
class ScriptedPusher {
 public:
  explicit ScriptedPusher(Goal goal) : waypoints_{{0.40, 0.5}, {0.60, 0.5}, {goal[0], goal[1]}} {}

  Action act(const State& s) {
    const std::array<double, 2> agent{s.values[0], s.values[1]};
    const std::array<double, 2> box{s.values[2], s.values[3]};
    while (stage_ + 1 < waypoints_.size() &&
           std::hypot(waypoints_[stage_][0] - box[0], waypoints_[stage_][1] - box[1]) < 0.015) {
      ++stage_;
    }
    const auto& p = waypoints_[stage_];
    const double dist = std::hypot(p[0] - box[0], p[1] - box[1]);
    if (dist < 1e-9) return Action{0.0, 0.0};
    const std::array<double, 2> u{(p[0] - box[0]) / dist, (p[1] - box[1]) / dist};
    const std::array<double, 2> rel{agent[0] - box[0], agent[1] - box[1]};
    const double along = rel[0] * u[0] + rel[1] * u[1];
    const double perp = std::hypot(rel[0] - along * u[0], rel[1] - along * u[1]);
    if (along < -0.02 && along > -0.1 && perp < 0.015) {
      const double scale = std::min(1.0, dist / PushGap2D::kStepScale);
      return Action{u[0] * scale, u[1] * scale};
    }
    const std::array<double, 2> spot{box[0] - 0.08 * u[0], box[1] - 0.08 * u[1]};
    const Action a = toward(agent, spot, PushGap2D::kStepScale);
    const std::array<double, 2> next{agent[0] + PushGap2D::kStepScale * a.values[0],
                                     agent[1] + PushGap2D::kStepScale * a.values[1]};
    const double approach = a.values[0] * -rel[0] + a.values[1] * -rel[1];
    if (approach <= 0.0 || std::hypot(next[0] - box[0], next[1] - box[1]) >= 0.07) return a;
    // Orbit the box tangentially so repositioning never drags it.
    std::array<double, 2> r = rel;
    double rn = std::hypot(r[0], r[1]);
    if (rn < 1e-9) {
      r = {-u[0], -u[1]};
      rn = 1.0;
    }
    std::array<double, 2> t{-r[1] / rn, r[0] / rn};
    if (t[0] * (spot[0] - agent[0]) + t[1] * (spot[1] - agent[1]) < 0.0) t = {-t[0], -t[1]};
    return Action{std::clamp(t[0] + 0.3 * r[0] / rn, -1.0, 1.0), std::clamp(t[1] + 0.3 * r[1] / rn, -1.0, 1.0)};
  }

 private:
  std::vector<std::array<double, 2>> waypoints_;
  std::size_t stage_ = 0;
};

bool crosses_outside_gap(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  const bool left_a = a[0] < PushGap2D::kWallX;
  const bool left_b = b[0] < PushGap2D::kWallX;
  if (left_a == left_b) return false;
  const double t = (PushGap2D::kWallX - a[0]) / (b[0] - a[0]);
  const double y = a[1] + t * (b[1] - a[1]);
  return y < PushGap2D::kGapLow || y > PushGap2D::kGapHigh;
}

}  // namespace

TEST(Envs, FactoryAndUnknownName) {
  for (const auto& name : env_names()) EXPECT_EQ(make_env(name)->name(), name);
  EXPECT_THROW(make_env("nosuch"), ConfigError);
}

TEST(Envs, GoalSupport) {
  Rng rng = make_rng(1);
  const auto pr = make_env("point_reach");
  const auto pg = make_env("push_gap");
  const auto th = make_env("throw");
  for (int i = 0; i < 10000; ++i) {
    const Goal a = pr->sample_desired_goal(rng);
    EXPECT_TRUE(a[0] >= 0 && a[0] <= 1 && a[1] >= 0 && a[1] <= 1);
    const Goal b = pg->sample_desired_goal(rng);
    EXPECT_TRUE(b[0] >= 0.6 && b[0] <= 0.95 && b[1] >= 0.05 && b[1] <= 0.95);
    const Goal c = th->sample_desired_goal(rng);
    EXPECT_GE(c[0], 1.2);
    EXPECT_LE(c[0], 1.8);
  }
  Rng a = make_rng(5), b = make_rng(5);
  EXPECT_EQ(pg->sample_desired_goal(a), pg->sample_desired_goal(b));
}

TEST(Envs, ResetGoalsInSupport) {
  auto pg = make_env("push_gap");
  auto th = make_env("throw");
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const Goal g = pg->reset(s).second;
    ASSERT_TRUE(g[0] >= 0.6 && g[0] <= 0.95);
    ASSERT_GE(th->reset(s).second[0], 1.2);
  }
}

TEST(PointReach, MeanGoalIsCentre) {
  Rng rng = make_rng(2);
  const PointReach2D env;
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Goal g = env.sample_desired_goal(rng);
    mx += g[0];
    my += g[1];
  }
  EXPECT_NEAR(mx / 1e5, 0.5, 0.01);
  EXPECT_NEAR(my / 1e5, 0.5, 0.01);
}

TEST(PointReach, ZeroActionIsFixedPointAndClipping) {
  PointReach2D env;
  const State s0 = env.reset(3).first;
  EXPECT_EQ(env.step(Action{0.0, 0.0}), s0);
  const auto clipped_before = env.clipped_actions();
  const State s1 = env.step(Action{5.0, 0.0});
  EXPECT_NEAR(s1.values[0], std::min(1.0, s0.values[0] + 0.05), 1e-15);
  EXPECT_EQ(env.clipped_actions(), clipped_before + 1);
  env.set_position(1.0, 1.0);
  EXPECT_EQ(env.step(Action{1.0, 1.0}), (State{1.0, 1.0}));
}

TEST(PointReach, ScriptedOracleSucceedsEverywhere) {
  PointReach2D env;
  const Policy oracle = [](const State& s, const Goal& g) {
    return toward({s.values[0], s.values[1]}, {g[0], g[1]}, PointReach2D::kStepScale);
  };
  EXPECT_EQ(evaluate(oracle, env, 200, 9), 1.0);
}

TEST(PushGap, WallBlocksOutsideGap) {
  PushGap2D env;
  env.reset(1);
  env.set_positions({PushGap2D::kWallX, 0.2}, {0.8, 0.8});
  const State s = env.step(Action{-1.0, 0.0});
  EXPECT_EQ(s.values[0], PushGap2D::kWallX);
  env.set_positions({0.48, 0.8}, {0.1, 0.1});
  const State l = env.step(Action{1.0, 0.0});
  EXPECT_LT(l.values[0], PushGap2D::kWallX);
  // Through the gap the wall is open.
  env.set_positions({0.48, 0.5}, {0.1, 0.1});
  EXPECT_GT(env.step(Action{1.0, 0.0}).values[0], PushGap2D::kWallX);
}

TEST(PushGap, PushMovesBoxByAgentDisplacement) {
  PushGap2D env;
  env.reset(1);
  env.set_positions({0.2, 0.3}, {0.25, 0.3});
  const State s = env.step(Action{1.0, 0.0});
  EXPECT_NEAR(s.values[2], 0.30, 1e-12);
  EXPECT_NEAR(s.values[3], 0.30, 1e-12);
  // Moving away does not drag the box.
  const State t = env.step(Action{-1.0, 0.0});
  EXPECT_NEAR(t.values[2], 0.30, 1e-12);
  // Out of contact range nothing happens.
  env.set_positions({0.1, 0.3}, {0.3, 0.3});
  EXPECT_NEAR(env.step(Action{1.0, 0.0}).values[2], 0.3, 1e-12);
  EXPECT_EQ(env.goal_map(t), (Goal{t.values[2], t.values[3]}));
}

TEST(PushGap, BodiesNeverCrossWallOutsideGapAndStayInBox) {
  PushGap2D env;
  Rng rng = make_rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::uint64_t ep = 0; ep < 300; ++ep) {
    env.reset(ep);
    // Start some episodes right at the gap edges to stress the wall.
    if (ep % 3 == 0) env.set_positions({0.47, 0.44 + 0.12 * u(rng)}, {0.52, 0.5 + 0.1 * u(rng)});
    for (int t = 0; t < 50; ++t) {
      const auto a0 = env.agent();
      const auto b0 = env.box();
      // Bias toward the wall so crossings are attempted often.
      env.step(Action{0.5 + 0.5 * u(rng), u(rng)});
      ASSERT_FALSE(crosses_outside_gap(a0, env.agent()));
      ASSERT_FALSE(crosses_outside_gap(b0, env.box()));
      for (double v : {env.agent()[0], env.agent()[1], env.box()[0], env.box()[1]}) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
    }
  }
}

TEST(PushGap, ScriptedPushThroughGapIsSolvable) {
  PushGap2D env;
  int solved = 0;
  const int episodes = 50;
  for (std::uint64_t seed = 0; seed < episodes; ++seed) {
    auto [s, goal] = env.reset(seed);
    ScriptedPusher pusher(goal);
    bool hit = false;
    for (int t = 0; t < env.horizon() && !hit; ++t) {
      s = env.step(pusher.act(s));
      hit = sparse_reward(env.goal_map(s), goal, env.reward_spec()) == 0.0;
    }
    solved += hit;
  }
  EXPECT_GE(solved, 1);
  EXPECT_GE(solved, episodes * 8 / 10) << "scripted pusher solved " << solved << "/" << episodes;
}

TEST(PushGap, ZeroPolicyNeverSucceeds) {
  AgentConfig cfg;
  cfg.hidden = 16;
  cfg.zero_init_output = true;
  PushGap2D env;
  DdpgAgent agent(env.dims(), cfg, 1);
  EXPECT_EQ(evaluate(agent, env, 50, 3), 0.0);
}

TEST(Throw, SingleIntegrationStepMatchesHandOracle) {
  std::array<double, 2> pos{1.0, 0.5};
  std::array<double, 2> vel{0.8, -0.3};
  Throw2D::integrate(pos, vel);
  const double k = 1.0 - Throw2D::kDamping * Throw2D::kDt;
  EXPECT_NEAR(vel[0], 0.8 * k, 1e-15);
  EXPECT_NEAR(vel[1], -0.3 * k, 1e-15);
  EXPECT_NEAR(pos[0], 1.0 + 0.8 * k * Throw2D::kDt, 1e-15);
  EXPECT_NEAR(pos[1], 0.5 - 0.3 * k * Throw2D::kDt, 1e-15);

  Throw2D env;
  env.reset(1);
  env.set_ball_in_flight({1.0, 0.5}, {0.8, -0.3}, 20);
  const State s = env.step(Action{0.7, 0.7});
  EXPECT_NEAR(s.values[2], 1.0 + 0.8 * k * Throw2D::kDt, 1e-15);
  EXPECT_EQ(s.values[6], 0.0);
}

TEST(Throw, AgentConfinedAndBallReleasedAfterHold) {
  Throw2D env;
  State s = env.reset(2).first;
  for (int t = 0; t < Throw2D::kHoldSteps; ++t) {
    EXPECT_EQ(s.values[6], 1.0);
    s = env.step(Action{1.0, 0.0});
    EXPECT_LE(s.values[0], Throw2D::kAgentMaxX);
  }
  EXPECT_EQ(s.values[6], 0.0);
  const double x_release = s.values[2];
  s = env.step(Action{-1.0, -1.0});
  EXPECT_GT(s.values[2], x_release);
}

TEST(Throw, ReleaseVelocityGridSearchReachesGoalBand) {
  // For several starts, some constant action during the hold phase lands the
  // ball within tolerance of the goal-band centre at the final step.
  const Goal centre{1.5, 0.5};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    double best = 1e9;
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 40; ++j) {
        const Action a{-1.0 + 0.05 * i, -1.0 + 0.05 * j};
        Throw2D env;
        State s = env.reset(seed).first;
        for (int t = 0; t < env.horizon(); ++t) s = env.step(t < Throw2D::kHoldSteps ? a : Action{0, 0});
        best = std::min(best, distance(env.goal_map(s), centre));
      }
    }
    EXPECT_LE(best, Throw2D::kDelta) << "seed " << seed;
  }
}

TEST(Envs, ScriptedRolloutIsBitwiseReproducibleAndRewardsConsistent) {
  for (const auto& name : env_names()) {
    auto env = make_env(name);
    const Policy wiggle = [](const State& s, const Goal& g) {
      return Action{std::sin(10 * s.values[0] + g[0]), std::cos(7 * s.values[1] - g[1])};
    };
    const Trajectory a = rollout(*env, 77, wiggle);
    const Trajectory b = rollout(*env, 77, wiggle);
    ASSERT_EQ(a.length(), 50u);
    for (std::size_t t = 0; t < a.length(); ++t) {
      EXPECT_EQ(a.transitions[t].next_state, b.transitions[t].next_state);
      EXPECT_EQ(a.transitions[t].reward,
                sparse_reward(env->goal_map(a.transitions[t].next_state), a.desired_goal,
                              env->reward_spec()));
      EXPECT_EQ(a.achieved_goals[t], env->goal_map(a.transitions[t].next_state));
    }
  }
}

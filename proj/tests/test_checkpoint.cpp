#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "gcrl/agent.hpp"

using namespace gcrl;

namespace {

DdpgAgent trained_agent() {
  AgentConfig cfg;
  cfg.hidden = 16;
  cfg.hidden_layers = 2;
  DdpgAgent agent({6, 2, 2}, cfg, 3);
  Rng rng = make_rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Transition> batch;
  for (int i = 0; i < 32; ++i) {
    State s{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    batch.push_back({s, Action{u(rng), u(rng)}, Goal{u(rng), u(rng)}, -1.0, s});
  }
  std::vector<State> states;
  std::vector<Goal> goals;
  for (const auto& t : batch) {
    states.push_back(t.state);
    goals.push_back(t.goal);
  }
  agent.update_normalizer(states, goals);
  for (int i = 0; i < 3; ++i) agent.update(batch);
  return agent;
}

}  // namespace

TEST(Checkpoint, BitwiseRoundTrip) {
  const DdpgAgent agent = trained_agent();
  const auto bytes = serialize_checkpoint(agent, "push_gap");
  const LoadedAgent loaded = deserialize_checkpoint(bytes);
  EXPECT_EQ(loaded.env_name, "push_gap");
  EXPECT_TRUE(loaded.agent.actor() == agent.actor());
  EXPECT_TRUE(loaded.agent.critic() == agent.critic());
  EXPECT_TRUE(loaded.agent.target_actor() == agent.target_actor());
  EXPECT_TRUE(loaded.agent.target_critic() == agent.target_critic());
  EXPECT_TRUE(loaded.agent.obs_normalizer() == agent.obs_normalizer());
  EXPECT_TRUE(loaded.agent.goal_normalizer() == agent.goal_normalizer());
  EXPECT_EQ(serialize_checkpoint(loaded.agent, "push_gap"), bytes);
  const State s{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  EXPECT_EQ(loaded.agent.forward_actor(s, Goal{0.7, 0.8}), agent.forward_actor(s, Goal{0.7, 0.8}));
}

TEST(Checkpoint, HeaderLayout) {
  const auto bytes = serialize_checkpoint(trained_agent(), "throw");
  ASSERT_GT(bytes.size(), 24u);
  EXPECT_EQ(std::memcmp(bytes.data(), "GCRLCKPT", 8), 0);
  // Little-endian u32 version 1, scalar size 4, name length 5.
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[9], 0);
  EXPECT_EQ(bytes[12], 4);
  EXPECT_EQ(bytes[16], 5);
  EXPECT_EQ(std::string(bytes.begin() + 20, bytes.begin() + 25), "throw");
}

TEST(Checkpoint, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "gcrl_test_agent.ckpt";
  const DdpgAgent agent = trained_agent();
  save_checkpoint(agent, "point_reach", path.string());
  const LoadedAgent loaded = load_checkpoint(path.string());
  EXPECT_EQ(serialize_checkpoint(loaded.agent, "point_reach"), serialize_checkpoint(agent, "point_reach"));
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint(path.string()), Error);
}

TEST(Checkpoint, RejectsCorruptInput) {
  auto bytes = serialize_checkpoint(trained_agent(), "push_gap");
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bad_magic), Error);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  EXPECT_THROW(deserialize_checkpoint(truncated), Error);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(deserialize_checkpoint(trailing), Error);
  auto bad_version = bytes;
  bad_version[8] = 9;
  EXPECT_THROW(deserialize_checkpoint(bad_version), Error);
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gcrl/agent.hpp"
#include "gcrl/curriculum.hpp"
#include "gcrl/replay.hpp"

namespace gcrl {

/// Everything that defines a training run. Two runs with equal configs
/// produce identical logs.
struct RunConfig {
  std::string env = "point_reach";
  std::uint64_t seed = 1;
  int epochs = 50;
  int episodes_per_epoch = 64;
  int eval_episodes = 20;
  int n_updates = 100;
  int her_batch = 256;
  int aug_batch = 128;

  // Method components; all off is plain DDPG + HER.
  bool goal_exploration = true;   // replace env goals with curriculum goals
  bool goal_augmentation = true;  // add ball samples around selected goals
  bool trans_augmentation = true; // pair stored transitions with curriculum goals

  CurriculumConfig curriculum;
  RelabelSpec relabel;
  AgentConfig agent;

  std::size_t goal_buffer_capacity = 1000;
  std::size_t transition_capacity = 1'000'000;

  int workers = 1;
  std::string out_dir;
  bool dump_goals = false;
  bool timing = false;      // write measured wall time into the log
  bool checkpoint = true;   // write agent.ckpt at the end of a CLI run

  /// Sets one field from its config-file key. Throws ConfigError on unknown
  /// keys or unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Throws ConfigError when a size is < 1 or the components disagree.
  void validate() const;

  /// key = value lines for every field, in the same format read by
  /// load_config().
  std::string to_text() const;

  bool any_curriculum() const { return goal_exploration || goal_augmentation || trans_augmentation; }
};

/// Reads `key = value` lines; `#` starts a comment. Later keys win.
void apply_config_text(RunConfig& cfg, std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

bool parse_switch(std::string_view value);
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace gcrl

#include "gcrl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gcrl/envs.hpp"
#include "gcrl/logging.hpp"

namespace gcrl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

template <typename T>
Field number_field(T RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) {
            c.*member = parse_number<T>(k, v);
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.*member);
            else return std::to_string(c.*member);
          }};
}

template <typename S, typename T>
Field nested_field(S RunConfig::*outer, T S::*member) {
  return {[outer, member](RunConfig& c, std::string_view k, std::string_view v) {
            c.*outer.*member = parse_number<T>(k, v);
          },
          [outer, member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.*outer.*member);
            else return std::to_string(c.*outer.*member);
          }};
}

Field switch_field(bool RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view, std::string_view v) { c.*member = parse_switch(v); },
          [member](const RunConfig& c) { return std::string(c.*member ? "on" : "off"); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> t;
    t["env"] = {[](RunConfig& c, std::string_view, std::string_view v) { c.env = std::string(v); },
                [](const RunConfig& c) { return c.env; }};
    t["out"] = {[](RunConfig& c, std::string_view, std::string_view v) { c.out_dir = std::string(v); },
                [](const RunConfig& c) { return c.out_dir; }};
    t["seed"] = number_field(&RunConfig::seed);
    t["epochs"] = number_field(&RunConfig::epochs);
    t["episodes_per_epoch"] = number_field(&RunConfig::episodes_per_epoch);
    t["eval_episodes"] = number_field(&RunConfig::eval_episodes);
    t["n_updates"] = number_field(&RunConfig::n_updates);
    t["her_batch"] = number_field(&RunConfig::her_batch);
    t["aug_batch"] = number_field(&RunConfig::aug_batch);
    t["curriculum"] = switch_field(&RunConfig::goal_exploration);
    t["goal_aug"] = switch_field(&RunConfig::goal_augmentation);
    t["trans_aug"] = switch_field(&RunConfig::trans_augmentation);
    t["select_size"] = nested_field(&RunConfig::curriculum, &CurriculumConfig::select_size);
    t["augment_size"] = nested_field(&RunConfig::curriculum, &CurriculumConfig::augment_size);
    t["pool_size"] = nested_field(&RunConfig::curriculum, &CurriculumConfig::pool_size);
    t["aug_radius"] = nested_field(&RunConfig::curriculum, &CurriculumConfig::aug_radius);
    t["alpha"] = nested_field(&RunConfig::curriculum, &CurriculumConfig::alpha);
    t["replay_k"] = nested_field(&RunConfig::relabel, &RelabelSpec::replay_k);
    t["hidden"] = nested_field(&RunConfig::agent, &AgentConfig::hidden);
    t["hidden_layers"] = nested_field(&RunConfig::agent, &AgentConfig::hidden_layers);
    t["gamma"] = nested_field(&RunConfig::agent, &AgentConfig::gamma);
    t["polyak"] = nested_field(&RunConfig::agent, &AgentConfig::polyak);
    t["lr_actor"] = nested_field(&RunConfig::agent, &AgentConfig::lr_actor);
    t["lr_critic"] = nested_field(&RunConfig::agent, &AgentConfig::lr_critic);
    t["noise_sigma"] = nested_field(&RunConfig::agent, &AgentConfig::noise_sigma);
    t["random_action_prob"] = nested_field(&RunConfig::agent, &AgentConfig::random_action_prob);
    t["action_l2"] = nested_field(&RunConfig::agent, &AgentConfig::action_l2);
    t["goal_buffer_capacity"] = number_field(&RunConfig::goal_buffer_capacity);
    t["transition_capacity"] = number_field(&RunConfig::transition_capacity);
    t["workers"] = number_field(&RunConfig::workers);
    t["dump_goals"] = switch_field(&RunConfig::dump_goals);
    t["timing"] = switch_field(&RunConfig::timing);
    t["checkpoint"] = switch_field(&RunConfig::checkpoint);
    return t;
  }();
  return table;
}

}  // namespace

bool parse_switch(std::string_view value) {
  if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
  if (value == "off" || value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("expected on|off, got '" + std::string(value) + "'");
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    if (item.empty()) throw ConfigError("empty entry in seed list");
    seeds.push_back(parse_number<std::uint64_t>("seeds", item));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second.set(*this, key, trim(value));
}

void RunConfig::validate() const {
  (void)make_env(env);
  if (epochs < 1 || episodes_per_epoch < 1 || eval_episodes < 1 || n_updates < 1 ||
      her_batch < 1 || workers < 1) {
    throw ConfigError("epochs, episode counts, update counts, batch sizes and workers must be >= 1");
  }
  if (aug_batch < 0) throw ConfigError("aug_batch must be >= 0");
  if (goal_buffer_capacity < 1 || transition_capacity < 1) {
    throw ConfigError("buffer capacities must be >= 1");
  }
  if (relabel.replay_k < 0) throw ConfigError("replay_k must be >= 0");
  CurriculumConfig effective = curriculum;
  if (!goal_augmentation) effective.augment_size = 0;
  effective.pool_size = std::min(effective.pool_size, effective.select_size + effective.augment_size);
  effective.validate(make_env(env)->reward_spec().delta);
  agent.validate();
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  for (const auto& [key, field] : fields()) out << key << " = " << field.get(*this) << '\n';
  return out.str();
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig cfg;
  apply_config_text(cfg, buf.str());
  return cfg;
}

}  // namespace gcrl

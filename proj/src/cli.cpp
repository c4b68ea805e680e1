#include "gcrl/cli.hpp"

#include <CLI11.hpp>

#include <ostream>

#include "gcrl/compare.hpp"
#include "gcrl/config.hpp"
#include "gcrl/envs.hpp"
#include "gcrl/trainer.hpp"

namespace gcrl {

namespace {

// Flags shared by `train` and `compare`. Strings stay empty unless given, so
// only explicit flags override the config file.
struct RunFlags {
  std::string config_file;
  std::string env;
  std::string seed;
  std::string epochs;
  std::string curriculum;
  std::string goal_aug;
  std::string trans_aug;
  std::string alpha;
  std::string out;
  std::string workers;
  std::vector<std::string> overrides;

  void add_to(CLI::App& cmd, bool with_seed, bool with_switches) {
    cmd.add_option("--config", config_file, "flat key = value config file");
    cmd.add_option("--env", env, "point_reach | push_gap | throw");
    if (with_seed) cmd.add_option("--seed", seed, "run seed");
    cmd.add_option("--epochs", epochs, "training epochs");
    if (with_switches) {
      cmd.add_option("--curriculum", curriculum, "goal exploration on|off");
      cmd.add_option("--goal-aug", goal_aug, "goal augmentation on|off");
      cmd.add_option("--trans-aug", trans_aug, "transition augmentation on|off");
    }
    cmd.add_option("--alpha", alpha, "explore ratio in (0, 1)");
    cmd.add_option("--out", out, "output directory");
    cmd.add_option("--workers", workers, "collection threads");
    cmd.add_option("--set", overrides, "extra config entry key=value (repeatable)");
  }

  RunConfig build() const {
    RunConfig cfg = config_file.empty() ? RunConfig{} : load_config(config_file);
    auto apply = [&](const char* key, const std::string& value) {
      if (!value.empty()) cfg.set(key, value);
    };
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    apply("env", env);
    apply("seed", seed);
    apply("epochs", epochs);
    apply("curriculum", curriculum);
    apply("goal_aug", goal_aug);
    apply("trans_aug", trans_aug);
    apply("alpha", alpha);
    apply("out", out);
    apply("workers", workers);
    cfg.validate();
    return cfg;
  }
};

std::string default_out_dir(const RunConfig& cfg, const std::string& kind) {
  return "runs/" + kind + "_" + cfg.env + "_seed" + std::to_string(cfg.seed);
}

void print_report(std::ostream& out, const std::string& prefix, const EpochReport& r) {
  out << prefix << "epoch " << r.epoch << "  episodes " << r.episodes << "  success "
      << format_double(r.success_rate) << "  critic " << r.critic_loss << "  actor " << r.actor_loss
      << "  eps " << r.epsilon << '\n';
  out.flush();
}

int run_train(const RunFlags& flags, bool quiet, std::ostream& out) {
  RunConfig cfg = flags.build();
  if (cfg.out_dir.empty()) cfg.out_dir = default_out_dir(cfg, "train");
  std::filesystem::create_directories(cfg.out_dir);
  write_text_file(std::filesystem::path(cfg.out_dir) / "config.txt", cfg.to_text());

  Trainer trainer(cfg);
  trainer.run([&](const EpochReport& r) {
    if (!quiet) print_report(out, "", r);
  });
  write_run_outputs(cfg.out_dir, trainer.reports(), cfg.env + " seed " + std::to_string(cfg.seed));
  if (cfg.checkpoint) {
    save_checkpoint(trainer.agent(), cfg.env, (std::filesystem::path(cfg.out_dir) / "agent.ckpt").string());
  }
  out << "final success " << format_double(final_success(trainer.reports())) << '\n'
      << "wrote " << cfg.out_dir << '\n';
  return kExitOk;
}

int run_eval(const std::string& checkpoint, int episodes, std::uint64_t seed, std::ostream& out) {
  if (episodes < 1) throw ConfigError("--episodes must be >= 1");
  if (!std::filesystem::exists(checkpoint)) {
    throw ConfigError("checkpoint '" + checkpoint + "' does not exist");
  }
  const LoadedAgent loaded = load_checkpoint(checkpoint);
  const auto env = make_env(loaded.env_name);
  const double success = evaluate(loaded.agent, *env, episodes, seed);
  out << "env " << loaded.env_name << "  episodes " << episodes << "  success "
      << format_double(success) << '\n';
  return kExitOk;
}

int run_compare_cmd(const RunFlags& flags, const std::string& seeds, const std::string& variants,
                    bool quiet, std::ostream& out) {
  RunConfig cfg = flags.build();
  CompareOptions options;
  options.seeds = parse_seed_list(seeds);
  if (!variants.empty()) {
    std::string_view rest = variants;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      options.variants.push_back(find_variant(std::string(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  options.out_dir = cfg.out_dir.empty() ? "runs/compare_" + cfg.env : cfg.out_dir;
  const auto results = run_compare(cfg, options, [&](const std::string& v, std::uint64_t s,
                                                     const EpochReport& r) {
    if (!quiet) print_report(out, v + " seed " + std::to_string(s) + ": ", r);
  });
  out << summary_table(results) << "wrote " << options.out_dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Goal-conditioned RL with a density-based goal curriculum", "gcrl"};
  app.require_subcommand(1);

  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress per-epoch output");

  RunFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "train one agent and write logs, plot and checkpoint");
  train_flags.add_to(*train, true, true);

  std::string checkpoint;
  int eval_episodes = 100;
  std::uint64_t eval_seed = 12345;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a saved checkpoint");
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--episodes", eval_episodes, "evaluation episodes");
  eval->add_option("--seed", eval_seed, "evaluation seed");

  RunFlags compare_flags;
  std::string seeds = "1,2,3";
  std::string variants;
  CLI::App* compare = app.add_subcommand("compare", "train method variants on the same seeds");
  compare_flags.add_to(*compare, false, false);
  compare->add_option("--seeds", seeds, "comma-separated seeds");
  compare->add_option("--variants", variants, "comma-separated subset of full,her,no_ge,no_ga,no_ta");

  std::vector<std::string> argv_store{"gcrl"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*train) return run_train(train_flags, quiet, out);
    if (*eval) return run_eval(checkpoint, eval_episodes, eval_seed, out);
    if (*compare) return run_compare_cmd(compare_flags, seeds, variants, quiet, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\nrun 'gcrl --help' for usage\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace gcrl

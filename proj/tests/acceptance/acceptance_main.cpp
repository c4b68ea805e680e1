// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. The lines are also written to `--results` (default
// acceptance_results.txt). `--only 1,2,7` runs a subset; `--out DIR` keeps
// training logs.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gcrl/agent.hpp"
#include "gcrl/compare.hpp"
#include "gcrl/curriculum.hpp"
#include "gcrl/envs.hpp"
#include "gcrl/kde.hpp"
#include "gcrl/mlp.hpp"
#include "gcrl/replay.hpp"
#include "gcrl/trainer.hpp"

using namespace gcrl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail: " << what << "] ";
    }
  }
};

// ---------------------------------------------------------------- 1: KDE

struct Component {
  double weight, mx, my, sx, sy;
};

double mixture_density(const std::vector<Component>& mix, double x, double y) {
  double p = 0.0;
  for (const auto& c : mix) {
    const double zx = (x - c.mx) / c.sx;
    const double zy = (y - c.my) / c.sy;
    p += c.weight * std::exp(-0.5 * (zx * zx + zy * zy)) / (2.0 * std::numbers::pi * c.sx * c.sy);
  }
  return p;
}

void kde_correctness(Outcome& o) {
  const auto start = Clock::now();
  const std::vector<Component> mix{
      {0.5, 0.30, 0.35, 0.10, 0.10}, {0.3, 0.70, 0.65, 0.12, 0.08}, {0.2, 0.45, 0.80, 0.08, 0.12}};
  Rng rng = make_rng(2024);
  std::discrete_distribution<int> pick{mix[0].weight, mix[1].weight, mix[2].weight};
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Goal> xs;
  for (int i = 0; i < 2000; ++i) {
    const auto& c = mix[static_cast<std::size_t>(pick(rng))];
    xs.push_back(Goal{c.mx + c.sx * nd(rng), c.my + c.sy * nd(rng)});
  }
  const DensityModel model = DensityModel::fit(xs);

  // 50 x 50 grid over the region holding essentially all the mass.
  const double lo = -0.1, hi = 1.15;
  double abs_err = 0.0;
  double peak = 0.0;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double x = lo + (hi - lo) * (i + 0.5) / 50.0;
      const double y = lo + (hi - lo) * (j + 0.5) / 50.0;
      const double truth = mixture_density(mix, x, y);
      peak = std::max(peak, truth);
      abs_err += std::abs(model.density(Goal{x, y}) - truth);
    }
  }
  const double mae = abs_err / 2500.0;

  // Monte-Carlo integral over a box padded well beyond every sample.
  double box_lo[2] = {1e9, 1e9}, box_hi[2] = {-1e9, -1e9};
  for (const auto& x : xs) {
    for (int k = 0; k < 2; ++k) {
      box_lo[k] = std::min(box_lo[k], x[k] - 5.0 * model.bandwidth());
      box_hi[k] = std::max(box_hi[k], x[k] + 5.0 * model.bandwidth());
    }
  }
  std::uniform_real_distribution<double> ux(box_lo[0], box_hi[0]);
  std::uniform_real_distribution<double> uy(box_lo[1], box_hi[1]);
  const int draws = 50000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += model.density(Goal{ux(rng), uy(rng)});
  const double integral = sum / draws * (box_hi[0] - box_lo[0]) * (box_hi[1] - box_lo[1]);
  const double elapsed = seconds_since(start);

  o.detail << "mae=" << mae << " limit=" << 0.05 * peak << " integral=" << integral << " time=" << elapsed
           << "s ";
  o.require(mae <= 0.05 * peak, "grid error");
  o.require(integral >= 0.95 && integral <= 1.05, "normalization");
  o.require(elapsed < 10.0, "runtime");
}

// ---------------------------------------------------------------- 2: priorities

void priority_suite(Outcome& o) {
  const auto start = Clock::now();
  Rng rng = make_rng(7);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_int_distribution<int> len(2, 300);
  double worst_sum = 0.0;
  int argmatch = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> d(static_cast<std::size_t>(len(rng)));
    for (auto& v : d) v = u(rng);
    const PriorityWeights w = priorities_from_densities(d);
    const double s = std::accumulate(w.probs.begin(), w.probs.end(), 0.0);
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    const auto amin = std::min_element(d.begin(), d.end()) - d.begin();
    const auto amax = std::max_element(w.probs.begin(), w.probs.end()) - w.probs.begin();
    argmatch += amin == amax;
  }
  const PriorityWeights flat = priorities_from_densities(std::vector<double>(17, 0.42));
  bool uniform = true;
  for (double p : flat.probs) uniform = uniform && std::abs(p - 1.0 / 17.0) <= 1e-15;
  const double elapsed = seconds_since(start);

  o.detail << "max|sum-1|=" << worst_sum << " argmin=argmax " << argmatch << "/1000 time=" << elapsed << "s ";
  o.require(worst_sum <= 1e-9, "sum");
  o.require(argmatch == 1000, "argmin/argmax");
  o.require(uniform, "degenerate uniform");
  o.require(elapsed < 1.0, "runtime");
}

// ---------------------------------------------------------------- 3: entropy ranking

void entropy_suite(Outcome& o) {
  Rng rng = make_rng(8);
  std::uniform_real_distribution<double> u(1e-6, 5.0);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  double worst_sum = 0.0;
  int invariant = 0;
  const int trials = 500;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 200);
    std::vector<Goal> goals;
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) {
      goals.push_back(Goal{static_cast<double>(i), 0.0});
      q[i] = u(rng);
    }
    const RankedGoals a = entropy_rank_from_densities(goals, q);
    const double c = scale(rng);
    std::vector<double> scaled(q);
    for (auto& v : scaled) v *= c;
    const RankedGoals b = entropy_rank_from_densities(goals, scaled);
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(a.entropies.begin(), a.entropies.end(), 0.0) - 1.0));
    invariant += a.order == b.order;
  }
  const std::vector<Goal> three{Goal{1.0, 0.0}, Goal{2.0, 0.0}, Goal{3.0, 0.0}};
  const RankedGoals ex = entropy_rank_from_densities(three, std::vector<double>{0.7, 0.2, 0.1});
  std::vector<std::size_t> one_based;
  for (std::size_t i : ex.order) one_based.push_back(i + 1);

  o.detail << "max|sum-1|=" << worst_sum << " scale-invariant " << invariant << "/" << trials << " example=["
           << one_based[0] << "," << one_based[1] << "," << one_based[2] << "] ";
  o.require(worst_sum <= 1e-9, "entropy sum");
  o.require(invariant == trials, "scale invariance");
  o.require(one_based == std::vector<std::size_t>{2, 1, 3}, "worked example");
}

// ---------------------------------------------------------------- 4: epsilon

void epsilon_suite(Outcome& o) {
  bool exact = true;
  for (double a : {0.1, 0.3, 0.5, 0.9}) exact = exact && epsilon(ExploreSchedule{a, 0.0}) == a;
  bool decreasing = true;
  for (int i = 0; i < 1000; ++i) {
    decreasing = decreasing &&
                 epsilon(ExploreSchedule{0.5, (i + 1) / 1000.0}) < epsilon(ExploreSchedule{0.5, i / 1000.0});
  }
  const double e1 = epsilon(ExploreSchedule{0.5, 0.0});
  const double e2 = epsilon(ExploreSchedule{0.5, 1.0});
  const double e3 = epsilon(ExploreSchedule{0.2, 0.5});
  o.detail << "examples=" << e1 << "," << e2 << "," << e3 << " ";
  o.require(exact, "eps(0) = alpha");
  o.require(decreasing, "strictly decreasing");
  // The listed values are 0.5, 0.06767 and 0.07358 at five digits; match
  // the closed forms to 1e-6 and the listed digits after rounding.
  auto rounded = [](double v) { return std::round(v * 1e5) / 1e5; };
  o.require(std::abs(e1 - 0.5) <= 1e-6 && std::abs(e2 - 0.5 * std::exp(-2.0)) <= 1e-6 &&
                std::abs(e3 - 0.2 * std::exp(-1.0)) <= 1e-6,
            "closed form");
  o.require(rounded(e2) == 0.06767 && rounded(e3) == 0.07358, "listed digits");
}

// ---------------------------------------------------------------- 5: augmentation

void augmentation_suite(Outcome& o) {
  Rng rng = make_rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Goal> base;
  for (int i = 0; i < 256; ++i) base.push_back(Goal{u(rng), u(rng)});
  CurriculumConfig cfg;
  cfg.augment_size = 100000;
  cfg.aug_radius = 0.03;
  const RewardSpec spec(0.05);  // delta of push_gap and point_reach
  std::vector<std::size_t> bases;
  const std::vector<Goal> aug = augment_goals(base, cfg, rng, &bases);
  std::size_t inside = 0, rewarded = 0;
  double mean = 0.0;
  for (std::size_t i = 0; i < aug.size(); ++i) {
    const Goal& b = base[bases[i]];
    const double d = std::hypot(aug[i][0] - b[0], aug[i][1] - b[1]);
    inside += d < cfg.aug_radius;
    rewarded += sparse_reward(aug[i], b, spec) == 0.0;
    mean += d;
  }
  mean /= static_cast<double>(aug.size());
  const double expected = 2.0 / 3.0 * cfg.aug_radius;
  o.detail << "inside=" << inside << "/" << aug.size() << " reward0=" << rewarded << " mean/expected="
           << mean / expected << " ";
  o.require(aug.size() == 100000 && inside == aug.size(), "within radius");
  o.require(rewarded == aug.size(), "reward 0 for every pair");
  o.require(std::abs(mean / expected - 1.0) <= 0.02, "mean distance");
}

// ---------------------------------------------------------------- 6: HER oracle

void her_suite(Outcome& o) {
  PushGap2D env;
  TransitionBuffer buf;
  GoalBuffer ag(1000), dg(1000);
  Rng act = make_rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Policy random_policy = [&](const State&, const Goal&) { return Action{u(act), u(act)}; };
  for (int ep = 0; ep < 200; ++ep) store_trajectory(buf, ag, dg, rollout(env, 1000 + ep, random_policy));
  const GoalMap goal_map = [&](const State& s) { return env.goal_map(s); };
  const RelabelSpec spec;
  Rng rng = make_rng(11);
  std::size_t relabeled = 0, total = 0, matched = 0;
  while (relabeled < 10000) {
    for (const auto& st : sample_her_batch_detailed(buf, spec, env.reward_spec(), goal_map, 256, rng)) {
      ++total;
      if (!st.relabeled) continue;
      ++relabeled;
      const Transition& t = st.transition;
      matched += t.reward == sparse_reward(env.goal_map(t.next_state), t.goal, env.reward_spec());
    }
  }
  const double fraction = static_cast<double>(relabeled) / static_cast<double>(total);
  const double target = static_cast<double>(spec.replay_k) / (spec.replay_k + 1.0);
  o.detail << "reward match " << matched << "/" << relabeled << " fraction=" << fraction << " target=" << target
           << " ";
  o.require(matched == relabeled, "reward recompute");
  o.require(std::abs(fraction - target) <= 0.01, "relabel fraction");
}

// ---------------------------------------------------------------- 7: gradients

using NetD = Mlp<double>;

template <typename Loss>
double max_relative_error(NetD& net, const NetD::Gradients& grads, Loss loss) {
  constexpr double kStep = 1e-5;
  double worst = 0.0;
  auto check = [&](double& p, double analytic) {
    const double saved = p;
    p = saved + kStep;
    const double up = loss();
    p = saved - kStep;
    const double down = loss();
    p = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic) / denom);
  };
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    for (Eigen::Index i = 0; i < net.weights()[l].size(); ++i) check(net.weights()[l].data()[i], grads.weights[l].data()[i]);
    for (Eigen::Index i = 0; i < net.biases()[l].size(); ++i) check(net.biases()[l].data()[i], grads.biases[l].data()[i]);
  }
  return worst;
}

NetD::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  NetD::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

void gradient_suite(Outcome& o) {
  const auto start = Clock::now();
  Rng rng = make_rng(12);
  // Push-gap shapes: state 6 + goal 2 into the actor, plus action 2 into the
  // critic; three hidden ReLU layers as in the agent.
  NetD actor({8, 32, 32, 32, 2}, OutputActivation::Tanh);
  NetD critic({10, 32, 32, 32, 1}, OutputActivation::Identity);
  actor.init_glorot(rng);
  critic.init_glorot(rng);
  const NetD::Matrix x_actor = random_matrix(8, 16, rng);
  const NetD::Matrix x_critic = random_matrix(10, 16, rng);
  const NetD::Matrix targets = random_matrix(1, 16, rng);

  NetD::Gradients cg;
  critic_loss<double>(critic, x_critic, targets, &cg);
  const double critic_err =
      max_relative_error(critic, cg, [&] { return critic_loss<double>(critic, x_critic, targets, nullptr); });
  NetD::Gradients ag;
  actor_loss<double>(actor, critic, x_actor, 1.0, &ag);
  const double actor_err =
      max_relative_error(actor, ag, [&] { return actor_loss<double>(actor, critic, x_actor, 1.0, nullptr); });
  const double elapsed = seconds_since(start);
  o.detail << "critic=" << critic_err << " actor=" << actor_err << " time=" << elapsed << "s ";
  o.require(critic_err <= 1e-4, "critic gradient");
  o.require(actor_err <= 1e-4, "actor gradient");
  o.require(elapsed < 30.0, "runtime");
}

// ---------------------------------------------------------------- 8-10: learning

std::string per_seed(const VariantResult& r) {
  std::ostringstream s;
  for (std::size_t i = 0; i < r.seeds.size(); ++i) s << (i ? "," : "") << r.finals[i];
  return s.str();
}

void learning_sanity(Outcome& o, const std::filesystem::path& out) {
  const auto start = Clock::now();
  RunConfig base;
  base.env = "point_reach";
  base.epochs = 50;
  CompareOptions opts;
  opts.variants = {find_variant("her")};
  if (!out.empty()) opts.out_dir = out / "point_reach";
  const auto results = run_compare(base, opts);
  const double elapsed = seconds_since(start);
  const double mean = results.front().mean_final;
  o.detail << "her final=" << mean << " per-seed=" << per_seed(results.front()) << " time=" << elapsed << "s ";
  o.require(mean >= 0.9, "success");
  o.require(elapsed < 600.0, "runtime");
}

struct PushResults {
  std::map<std::string, double> mean;
  std::map<std::string, std::string> seeds;
  double central_seconds = 0.0;
};

PushResults run_push_variants(const std::vector<std::string>& names, const std::filesystem::path& out) {
  PushResults res;
  RunConfig base;
  base.env = "push_gap";
  base.epochs = 150;
  for (const auto& name : names) {
    const auto start = Clock::now();
    CompareOptions opts;
    opts.variants = {find_variant(name)};
    if (!out.empty()) opts.out_dir = out / ("push_gap_" + name);
    const auto r = run_compare(base, opts);
    const double elapsed = seconds_since(start);
    if (name == "full" || name == "her") res.central_seconds += elapsed;
    res.mean[name] = r.front().mean_final;
    res.seeds[name] = per_seed(r.front());
    std::printf("  push_gap %-5s final=%.4f per-seed=%s (%.0fs)\n", name.c_str(), r.front().mean_final,
                per_seed(r.front()).c_str(), elapsed);
    std::fflush(stdout);
  }
  return res;
}

void central_claim(Outcome& o, const PushResults& r) {
  const double full = r.mean.at("full");
  const double her = r.mean.at("her");
  o.detail << "full=" << full << " her=" << her << " diff=" << full - her << " time=" << r.central_seconds << "s ";
  o.require(full >= 0.8, "full >= 0.8");
  o.require(full - her >= 0.15, "full - her >= 0.15");
  o.require(r.central_seconds < 2400.0, "runtime");
}

void ablation_direction(Outcome& o, const PushResults& r) {
  const double full = r.mean.at("full");
  const double her = r.mean.at("her");
  for (const char* name : {"no_ge", "no_ga", "no_ta"}) {
    const double v = r.mean.at(name);
    o.detail << name << "=" << v << " ";
    o.require(v <= full + 0.05, std::string(name) + " <= full");
    o.require(v >= her - 0.05, std::string(name) + " >= her");
  }
  o.detail << "(full=" << full << " her=" << her << ") ";
}

// ---------------------------------------------------------------- 11: determinism

void determinism(Outcome& o) {
  RunConfig cfg;
  cfg.env = "push_gap";
  cfg.epochs = 5;
  cfg.seed = 17;
  const auto dir = std::filesystem::temp_directory_path() / "gcrl_acceptance_determinism";
  std::vector<std::string> files;
  for (int run = 0; run < 2; ++run) {
    Trainer t(cfg);
    const auto path = dir / ("run" + std::to_string(run));
    write_run_outputs(path, t.run(), "determinism");
    std::ifstream in(path / "progress.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files.push_back(ss.str());
  }
  std::filesystem::remove_all(dir);
  o.detail << "bytes=" << files[0].size() << " ";
  o.require(!files[0].empty() && files[0] == files[1], "byte-identical CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string only;
  std::string out;
  app.add_option("--only", only, "comma-separated criterion numbers");
  std::string results = "acceptance_results.txt";
  app.add_option("--out", out, "directory for training logs");
  app.add_option("--results", results, "file receiving the PASS/FAIL lines");
  CLI11_PARSE(app, argc, argv);

  std::set<int> selected;
  if (only.empty()) {
    for (int i = 1; i <= 11; ++i) selected.insert(i);
  } else {
    std::stringstream ss(only);
    for (std::string item; std::getline(ss, item, ',');) selected.insert(std::stoi(item));
  }
  const std::filesystem::path out_dir = out;

  std::optional<PushResults> push;
  auto push_results = [&]() -> const PushResults& {
    if (!push) {
      std::vector<std::string> names{"full", "her"};
      if (selected.count(10)) names.insert(names.end(), {"no_ge", "no_ga", "no_ta"});
      push = run_push_variants(names, out_dir);
    }
    return *push;
  };

  const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria{
      {1, kde_correctness},
      {2, priority_suite},
      {3, entropy_suite},
      {4, epsilon_suite},
      {5, augmentation_suite},
      {6, her_suite},
      {7, gradient_suite},
      {8, [&](Outcome& o) { learning_sanity(o, out_dir); }},
      {9, [&](Outcome& o) { central_claim(o, push_results()); }},
      {10, [&](Outcome& o) { ablation_direction(o, push_results()); }},
      {11, determinism},
  };

  std::ofstream results_file(results, std::ios::trunc);
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!selected.count(id)) continue;
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failures += !o.pass;
    char head[32];
    std::snprintf(head, sizeof head, "criterion %2d: %s  ", id, o.pass ? "PASS" : "FAIL");
    const std::string line = head + o.detail.str();
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    results_file << line << '\n' << std::flush;
  }
  return failures == 0 ? 0 : 1;
}

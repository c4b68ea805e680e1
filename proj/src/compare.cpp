#include "gcrl/compare.hpp"

#include <cstdio>

#include "gcrl/trainer.hpp"

namespace gcrl {

void Variant::apply(RunConfig& cfg) const {
  cfg.goal_exploration = goal_exploration;
  cfg.goal_augmentation = goal_augmentation;
  cfg.trans_augmentation = trans_augmentation;
}

const std::vector<Variant>& standard_variants() {
  static const std::vector<Variant> variants{
      {"full", true, true, true},
      {"her", false, false, false},
      {"no_ge", false, true, true},
      {"no_ga", true, false, true},
      {"no_ta", true, true, false},
  };
  return variants;
}

Variant find_variant(const std::string& name) {
  for (const auto& v : standard_variants()) {
    if (v.name == name) return v;
  }
  throw ConfigError("unknown variant '" + name + "' (expected full, her, no_ge, no_ga or no_ta)");
}

std::vector<VariantResult> run_compare(
    const RunConfig& base, const CompareOptions& options,
    const std::function<void(const std::string&, std::uint64_t, const EpochReport&)>& on_epoch) {
  if (options.seeds.empty()) throw ConfigError("compare needs at least one seed");
  std::vector<Variant> variants = options.variants;
  if (variants.empty()) variants = {find_variant("full"), find_variant("her")};

  std::vector<VariantResult> results;
  for (const auto& variant : variants) {
    VariantResult result;
    result.variant = variant;
    result.seeds = options.seeds;
    double sum = 0.0;
    for (std::uint64_t seed : options.seeds) {
      RunConfig cfg = base;
      variant.apply(cfg);
      cfg.seed = seed;
      cfg.out_dir.clear();
      const std::string run_name = variant.name + "_seed" + std::to_string(seed);
      if (!options.out_dir.empty()) cfg.out_dir = (options.out_dir / run_name).string();
      if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);

      Trainer trainer(cfg);
      trainer.run([&](const EpochReport& r) {
        if (on_epoch) on_epoch(variant.name, seed, r);
      });
      if (!cfg.out_dir.empty()) write_run_outputs(cfg.out_dir, trainer.reports(), run_name);
      result.runs.push_back(trainer.reports());
      result.finals.push_back(final_success(trainer.reports(), options.final_window));
      sum += result.finals.back();
    }
    result.mean_final = sum / static_cast<double>(result.finals.size());
    results.push_back(std::move(result));
  }

  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    write_learning_curve_svg(mean_curves(results), base.env + ": mean test success",
                             options.out_dir / "compare.svg");
    write_text_file(options.out_dir / "summary.txt", summary_table(results));
  }
  return results;
}

std::string summary_table(const std::vector<VariantResult>& results) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %10s  %s\n", "variant", "mean_final", "per_seed");
  out += line;
  for (const auto& r : results) {
    std::string per_seed;
    for (std::size_t i = 0; i < r.finals.size(); ++i) {
      char cell[64];
      std::snprintf(cell, sizeof cell, "%s%llu:%.3f", i ? " " : "",
                    static_cast<unsigned long long>(r.seeds[i]), r.finals[i]);
      per_seed += cell;
    }
    std::snprintf(line, sizeof line, "%-8s %10.3f  ", r.variant.name.c_str(), r.mean_final);
    out += line;
    out += per_seed;
    out += '\n';
  }
  return out;
}

std::vector<PlotSeries> mean_curves(const std::vector<VariantResult>& results) {
  std::vector<PlotSeries> series;
  for (const auto& r : results) {
    PlotSeries s{r.variant.name, {}, {}};
    if (!r.runs.empty()) {
      std::size_t len = r.runs.front().size();
      for (const auto& run : r.runs) len = std::min(len, run.size());
      for (std::size_t k = 0; k < len; ++k) {
        double sum = 0.0;
        for (const auto& run : r.runs) sum += run[k].success_rate;
        s.x.push_back(r.runs.front()[k].epoch);
        s.y.push_back(sum / static_cast<double>(r.runs.size()));
      }
    }
    series.push_back(std::move(s));
  }
  return series;
}

}  // namespace gcrl

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gcrl/config.hpp"
#include "gcrl/logging.hpp"

namespace gcrl {

/// A named setting of the three method flags.
struct Variant {
  std::string name;
  bool goal_exploration = false;
  bool goal_augmentation = false;
  bool trans_augmentation = false;

  void apply(RunConfig& cfg) const;
};

/// full, her, no_ge, no_ga, no_ta.
const std::vector<Variant>& standard_variants();
Variant find_variant(const std::string& name);

struct VariantResult {
  Variant variant;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<EpochReport>> runs;  // one per seed
  std::vector<double> finals;                  // final success per seed
  double mean_final = 0.0;
};

struct CompareOptions {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<Variant> variants;   // empty means {full, her}
  int final_window = 5;
  std::filesystem::path out_dir;   // per-run logs, joint plot and summary when set
};

/// Trains every variant on every seed from the same base config.
std::vector<VariantResult> run_compare(
    const RunConfig& base, const CompareOptions& options,
    const std::function<void(const std::string& variant, std::uint64_t seed, const EpochReport&)>&
        on_epoch = {});

/// Fixed-width table: variant, mean final success, per-seed values.
std::string summary_table(const std::vector<VariantResult>& results);

/// One polyline per variant: the seed-mean success curve.
std::vector<PlotSeries> mean_curves(const std::vector<VariantResult>& results);

}  // namespace gcrl

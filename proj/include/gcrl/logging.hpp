#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gcrl/core.hpp"

namespace gcrl {

struct EpochReport {
  int epoch = 0;
  long long episodes = 0;      // cumulative training episodes
  double success_rate = 0.0;   // test success rate p_s in [0, 1]
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double epsilon = 0.0;
  double wall_s = 0.0;

  bool operator==(const EpochReport&) const = default;
};

inline constexpr const char* kProgressHeader =
    "epoch,episodes,success_rate,critic_loss,actor_loss,epsilon,wall_s";

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string progress_csv(const std::vector<EpochReport>& reports);
/// Throws Error with the path on I/O failure.
void write_progress_csv(const std::vector<EpochReport>& reports, const std::filesystem::path& path);
std::vector<EpochReport> parse_progress_csv(const std::string& text);
std::vector<EpochReport> read_progress_csv(const std::filesystem::path& path);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line chart with one polyline per series. The y axis spans [0, 1].
std::string learning_curve_svg(const std::vector<PlotSeries>& series, const std::string& title);
void write_learning_curve_svg(const std::vector<PlotSeries>& series, const std::string& title,
                              const std::filesystem::path& path);

PlotSeries success_series(const std::vector<EpochReport>& reports, const std::string& label);

/// Appends `epoch,set,index,g0,g1,...` rows; writes the header when the file
/// is new.
void append_goal_dump(const std::filesystem::path& path, int epoch, const std::string& set,
                      const std::vector<Goal>& goals);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gcrl

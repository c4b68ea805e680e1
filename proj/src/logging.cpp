#include "gcrl/logging.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace gcrl {

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error("progress CSV: bad number '" + std::string(s) + "'");
  return v;
}

long long parse_integer(std::string_view s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error("progress CSV: bad integer '" + std::string(s) + "'");
  return v;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return {buf.data(), ptr};
}

std::string progress_csv(const std::vector<EpochReport>& reports) {
  std::string out = kProgressHeader;
  out += '\n';
  for (const auto& r : reports) {
    out += std::to_string(r.epoch) + ',' + std::to_string(r.episodes) + ',' +
           format_double(r.success_rate) + ',' + format_double(r.critic_loss) + ',' +
           format_double(r.actor_loss) + ',' + format_double(r.epsilon) + ',' +
           format_double(r.wall_s) + '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

void write_progress_csv(const std::vector<EpochReport>& reports, const std::filesystem::path& path) {
  write_text_file(path, progress_csv(reports));
}

std::vector<EpochReport> parse_progress_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kProgressHeader) throw Error("progress CSV: bad header");
  std::vector<EpochReport> reports;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 7) throw Error("progress CSV: expected 7 columns");
    EpochReport r;
    r.epoch = static_cast<int>(parse_integer(cells[0]));
    r.episodes = parse_integer(cells[1]);
    r.success_rate = parse_double(cells[2]);
    r.critic_loss = parse_double(cells[3]);
    r.actor_loss = parse_double(cells[4]);
    r.epsilon = parse_double(cells[5]);
    r.wall_s = parse_double(cells[6]);
    reports.push_back(r);
  }
  return reports;
}

std::vector<EpochReport> read_progress_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_progress_csv(buf.str());
}

PlotSeries success_series(const std::vector<EpochReport>& reports, const std::string& label) {
  PlotSeries s{label, {}, {}};
  for (const auto& r : reports) {
    s.x.push_back(r.epoch);
    s.y.push_back(r.success_rate);
  }
  return s;
}

std::string learning_curve_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_max = 1.0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ContractViolation("plot series x/y length mismatch");
    for (double x : s.x) x_max = std::max(x_max, x);
  }
  auto px = [&](double x) { return kLeft + plot_w * x / x_max; };
  auto py = [&](double y) { return kTop + plot_h * (1.0 - std::clamp(y, 0.0, 1.0)); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" fill=\"white\"/>\n"
    << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
    << xml_escape(title) << "</text>\n"
    << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << px(x_max) << "\" y2=\""
    << py(0) << "\"/>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft << "\" y2=\"" << py(1)
    << "\"/>\n</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = i / 4.0;
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">"
      << format_double(y) << "</text>\n";
  }
  o << "<text x=\"" << kLeft << "\" y=\"" << py(0) + 18 << "\">0</text>\n"
    << "<text x=\"" << px(x_max) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"end\">"
    << format_double(x_max) << "</text>\n"
    << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
    << "\" text-anchor=\"middle\">epoch</text>\n"
    << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" transform=\"rotate(-90 16 "
    << kTop + plot_h / 2 << ")\" text-anchor=\"middle\">success rate</text>\n</g>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % kPalette.size()];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[i].x.size(); ++k) {
      if (k) o << ' ';
      o << px(series[i].x[k]) << ',' << py(series[i].y[k]);
    }
    o << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(i);
    o << "<text x=\"" << kWidth - kRight + 12 << "\" y=\"" << ly + 4
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">"
      << xml_escape(series[i].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_learning_curve_svg(const std::vector<PlotSeries>& series, const std::string& title,
                              const std::filesystem::path& path) {
  write_text_file(path, learning_curve_svg(series, title));
}

void append_goal_dump(const std::filesystem::path& path, int epoch, const std::string& set,
                      const std::vector<Goal>& goals) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  if (fresh) {
    out << "epoch,set,index";
    const std::size_t d = goals.empty() ? 0 : goals.front().dim();
    for (std::size_t k = 0; k < d; ++k) out << ",g" << k;
    out << '\n';
  }
  for (std::size_t i = 0; i < goals.size(); ++i) {
    out << epoch << ',' << set << ',' << i;
    for (double c : goals[i].coords) out << ',' << format_double(c);
    out << '\n';
  }
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace gcrl

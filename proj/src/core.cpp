#include "gcrl/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>

namespace gcrl {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> streams) {
  std::uint64_t s = mix_seed(seed, 0x5eed);
  for (auto id : streams) s = mix_seed(s, id);
  return Rng(s);
}

RewardSpec::RewardSpec(double tolerance, Metric m) : delta(tolerance), metric(m) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ContractViolation("reward tolerance must be positive and finite");
  }
}

namespace {
std::atomic<bool> g_warnings_enabled{true};
std::atomic<std::size_t> g_warning_count{0};
}  // namespace

void warn(std::string_view message) {
  ++g_warning_count;
  if (g_warnings_enabled) std::cerr << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) { g_warnings_enabled = enabled; }

std::size_t warning_count() { return g_warning_count; }

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

void require_finite(std::span<const double> xs, std::string_view what) {
  if (!all_finite(xs)) throw ContractViolation(std::string(what) + ": non-finite value");
}

void require_same_dim(const Goal& a, const Goal& b, std::string_view what) {
  if (a.dim() != b.dim()) {
    throw ContractViolation(std::string(what) + ": goal dimension mismatch (" +
                            std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

double distance(const Goal& a, const Goal& b) {
  require_same_dim(a, b, "distance");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

double sparse_reward(const Goal& achieved, const Goal& desired, const RewardSpec& spec) {
  return distance(achieved, desired) <= spec.delta ? 0.0 : -1.0;
}

Action Env::clip_action(const Action& action) {
  if (action.dim() != dims().action) {
    throw ContractViolation("action dimension mismatch");
  }
  require_finite(action.values, "action");
  Action out = action;
  bool clipped = false;
  for (auto& v : out.values) {
    const double c = std::clamp(v, -1.0, 1.0);
    clipped = clipped || c != v;
    v = c;
  }
  if (clipped) ++clipped_actions_;
  return out;
}

}  // namespace gcrl

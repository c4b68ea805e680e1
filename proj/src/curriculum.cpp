#include "gcrl/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gcrl {

void CurriculumConfig::validate(double delta) const {
  if (select_size < 1) throw ConfigError("select_size must be >= 1");
  if (augment_size < 0) throw ConfigError("augment_size must be >= 0");
  if (pool_size < 1) throw ConfigError("pool_size must be >= 1");
  if (pool_size > select_size + augment_size) {
    throw ConfigError("pool_size must not exceed select_size + augment_size");
  }
  if (!(aug_radius > 0.0)) throw ConfigError("aug_radius must be > 0");
  if (aug_radius > delta) throw ConfigError("aug_radius must not exceed the reward tolerance");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

std::vector<Goal> CurriculumBatch::candidates() const {
  std::vector<Goal> out = selected;
  out.insert(out.end(), augmented.begin(), augmented.end());
  return out;
}

double ExploreSchedule::epsilon() const {
  if (!(last_success_rate >= 0.0 && last_success_rate <= 1.0)) {
    throw ContractViolation("success rate must lie in [0, 1]");
  }
  return alpha * std::exp(-2.0 * last_success_rate);
}

double epsilon(const ExploreSchedule& schedule) { return schedule.epsilon(); }

std::vector<double> inverted_softmax(std::span<const double> normalized) {
  if (normalized.empty()) throw Error("inverted_softmax: empty input");
  // Softmax is shift invariant; subtract the max logit for stability.
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double n : normalized) max_logit = std::max(max_logit, 1.0 - n);
  std::vector<double> probs(normalized.size());
  double total = 0.0;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    probs[i] = std::exp(1.0 - normalized[i] - max_logit);
    total += probs[i];
  }
  for (auto& p : probs) p /= total;
  return probs;
}

PriorityWeights priorities_from_densities(std::vector<double> raw) {
  if (raw.empty()) throw Error("density_priorities: empty achieved-goal buffer");
  require_finite(raw, "density_priorities");
  PriorityWeights w;
  w.raw = std::move(raw);
  const double rho_min = *std::min_element(w.raw.begin(), w.raw.end());
  double spread = 0.0;
  for (double r : w.raw) spread += r - rho_min;
  w.normalized.assign(w.raw.size(), 0.0);
  if (spread >= kDegenerateSpread) {
    for (std::size_t i = 0; i < w.raw.size(); ++i) w.normalized[i] = (w.raw[i] - rho_min) / spread;
  }
  w.probs = inverted_softmax(w.normalized);
  return w;
}

PriorityWeights density_priorities(std::span<const Goal> ag_buffer, const DensityModel& model) {
  if (ag_buffer.empty()) throw Error("density_priorities: empty achieved-goal buffer");
  std::vector<double> raw;
  raw.reserve(ag_buffer.size());
  for (const auto& g : ag_buffer) raw.push_back(model.density(g));
  return priorities_from_densities(std::move(raw));
}

std::vector<Goal> sample_achieved(std::span<const Goal> ag_buffer, const PriorityWeights& weights,
                                  int k, Rng& rng) {
  if (k < 1) throw ContractViolation("sample_achieved: k must be >= 1");
  if (weights.probs.size() != ag_buffer.size()) {
    throw ContractViolation("sample_achieved: weights do not match the buffer");
  }
  std::discrete_distribution<std::size_t> pick(weights.probs.begin(), weights.probs.end());
  std::vector<Goal> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(ag_buffer[pick(rng)]);
  return out;
}

std::vector<Goal> augment_goals(std::span<const Goal> selected, const CurriculumConfig& cfg,
                                Rng& rng, std::vector<std::size_t>* bases) {
  if (!(cfg.aug_radius > 0.0)) throw ConfigError("aug_radius must be > 0");
  if (cfg.augment_size < 0) throw ConfigError("augment_size must be >= 0");
  if (bases) bases->clear();
  if (cfg.augment_size == 0) return {};
  if (selected.empty()) throw Error("augment_goals: no selected goals");

  const std::size_t d = selected.front().dim();
  std::uniform_int_distribution<std::size_t> pick(0, selected.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Goal> out;
  out.reserve(static_cast<std::size_t>(cfg.augment_size));
  std::vector<double> dir(d);
  for (int i = 0; i < cfg.augment_size; ++i) {
    const std::size_t b = pick(rng);
    const Goal& base = selected[b];
    Goal g;
    // Uniform in volume: radius = R * U^(1/d); resample on the (rounding)
    // boundary so the ball stays open.
    do {
      double norm = 0.0;
      do {
        norm = 0.0;
        for (auto& x : dir) {
          x = normal(rng);
          norm += x * x;
        }
        norm = std::sqrt(norm);
      } while (norm == 0.0);
      const double r = cfg.aug_radius * std::pow(unit(rng), 1.0 / static_cast<double>(d));
      g.coords.resize(d);
      for (std::size_t k = 0; k < d; ++k) g.coords[k] = base[k] + r * dir[k] / norm;
    } while (distance(g, base) >= cfg.aug_radius);
    out.push_back(std::move(g));
    if (bases) bases->push_back(b);
  }
  return out;
}

RankedGoals entropy_rank_from_log_densities(std::span<const Goal> candidates,
                                            std::span<const double> log_q) {
  if (candidates.empty()) throw Error("entropy_rank: no candidates");
  if (log_q.size() != candidates.size()) {
    throw ContractViolation("entropy_rank: density count does not match candidates");
  }
  const std::size_t n = candidates.size();
  double max_log = -std::numeric_limits<double>::infinity();
  for (double l : log_q) max_log = std::max(max_log, l);
  if (!std::isfinite(max_log)) throw ContractViolation("entropy_rank: all densities are zero");

  double sum = 0.0;
  for (double l : log_q) sum += std::exp(l - max_log);
  const double log_total = max_log + std::log(sum);

  // Batch probability p_i = q_i / sum_j q_j, entropy e_i = -p_i ln p_i.
  std::vector<double> e(n, 0.0);
  std::vector<double> p(n, 0.0);
  double e_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double log_p = log_q[i] - log_total;
    p[i] = std::exp(log_p);
    e[i] = p[i] > 0.0 ? -p[i] * log_p : 0.0;
    e_total += e[i];
  }
  std::vector<double> e_hat(n, 1.0 / static_cast<double>(n));
  if (e_total > 0.0) {
    for (std::size_t i = 0; i < n; ++i) e_hat[i] = e[i] / e_total;
  }

  RankedGoals out;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return e_hat[a] > e_hat[b]; });
  out.goals.reserve(n);
  out.entropies.reserve(n);
  out.probs.reserve(n);
  for (auto i : out.order) {
    out.goals.push_back(candidates[i]);
    out.entropies.push_back(e_hat[i]);
    out.probs.push_back(p[i]);
  }
  return out;
}

RankedGoals entropy_rank_from_densities(std::span<const Goal> candidates,
                                        std::span<const double> q) {
  std::vector<double> log_q;
  log_q.reserve(q.size());
  for (double v : q) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ContractViolation("entropy_rank: densities must be finite and non-negative");
    }
    log_q.push_back(v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity());
  }
  return entropy_rank_from_log_densities(candidates, log_q);
}

RankedGoals entropy_rank(std::span<const Goal> candidates, const DensityModel& desired_model) {
  if (candidates.empty()) throw Error("entropy_rank: no candidates");
  std::vector<double> log_q;
  log_q.reserve(candidates.size());
  for (const auto& g : candidates) log_q.push_back(desired_model.log_density(g));
  return entropy_rank_from_log_densities(candidates, log_q);
}

CurriculumBatch build_batch(std::span<const Goal> ag_buffer, const DensityModel& ag_model,
                            const DensityModel& dg_model, const CurriculumConfig& cfg, Rng& rng) {
  CurriculumBatch batch;
  batch.ag_weights = density_priorities(ag_buffer, ag_model);
  batch.selected = sample_achieved(ag_buffer, batch.ag_weights, cfg.select_size, rng);
  batch.augmented = augment_goals(batch.selected, cfg, rng);
  const std::vector<Goal> candidates = batch.candidates();
  RankedGoals ranked = entropy_rank(candidates, dg_model);
  batch.ranked = std::move(ranked.goals);
  batch.entropies = std::move(ranked.entropies);
  batch.batch_probs = std::move(ranked.probs);
  const std::size_t keep = std::min(static_cast<std::size_t>(cfg.pool_size), batch.ranked.size());
  batch.pool.assign(batch.ranked.begin(), batch.ranked.begin() + static_cast<std::ptrdiff_t>(keep));
  return batch;
}

Goal maybe_replace_goal(const Goal& env_goal, const CurriculumBatch& batch,
                        const ExploreSchedule& schedule, Rng& rng, bool* replaced) {
  if (replaced) *replaced = false;
  const double eps = schedule.epsilon();
  if (batch.pool.empty()) {
    warn("exploration pool is empty; keeping the environment goal");
    return env_goal;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) >= eps) return env_goal;
  std::uniform_int_distribution<std::size_t> pick(0, batch.pool.size() - 1);
  if (replaced) *replaced = true;
  return batch.pool[pick(rng)];
}

}  // namespace gcrl

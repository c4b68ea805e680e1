#pragma once

#include <span>
#include <string>
#include <vector>

#include "gcrl/core.hpp"
#include "gcrl/mlp.hpp"

namespace gcrl {

/// Running mean/variance of a vector stream. normalize() returns
/// (x - mean) / max(std, eps) clipped to [-clip, clip].
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  RunningNormalizer(std::size_t dim, double eps = 0.01, double clip = 5.0);

  void update(std::span<const double> x);
  std::vector<double> normalize(std::span<const double> x) const;
  template <typename T>
  void normalize_into(std::span<const double> x, T* out) const {
    for (std::size_t i = 0; i < dim_; ++i) out[i] = static_cast<T>(normalize_one(x[i], i));
  }

  std::size_t dim() const { return dim_; }
  double count() const { return count_; }
  std::vector<double> mean() const;
  std::vector<double> stddev() const;
  double eps() const { return eps_; }
  double clip() const { return clip_; }

  const std::vector<double>& sum() const { return sum_; }
  const std::vector<double>& sumsq() const { return sumsq_; }
  /// Restores raw accumulators (checkpoint loading).
  void restore(double count, std::vector<double> sum, std::vector<double> sumsq);

  bool operator==(const RunningNormalizer&) const = default;

 private:
  double normalize_one(double x, std::size_t i) const;

  std::size_t dim_ = 0;
  double eps_ = 0.01;
  double clip_ = 5.0;
  double count_ = 0.0;
  std::vector<double> sum_;
  std::vector<double> sumsq_;
};

struct AgentConfig {
  int hidden = 256;
  int hidden_layers = 3;
  double gamma = 0.98;
  double polyak = 0.95;
  double lr_actor = 1e-3;
  double lr_critic = 1e-3;
  double noise_sigma = 0.2;
  double random_action_prob = 0.3;
  double action_l2 = 1.0;
  double norm_eps = 0.01;
  double norm_clip = 5.0;
  bool zero_init_output = false;

  void validate() const;
};

struct UpdateReport {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double mean_target_q = 0.0;
};

/// Mean squared error of critic outputs against `targets` (1 x batch).
/// Fills critic parameter gradients when `grads` is non-null.
template <typename T>
T critic_loss(const Mlp<T>& critic, const typename Mlp<T>::Matrix& input,
              const typename Mlp<T>::Matrix& targets, typename Mlp<T>::Gradients* grads) {
  typename Mlp<T>::Tape tape;
  const auto q = critic.forward(input, tape);
  const auto diff = (q - targets).eval();
  const T batch = static_cast<T>(input.cols());
  const T loss = diff.squaredNorm() / batch;
  if (grads) critic.backward(tape, (T(2) / batch) * diff, grads);
  return loss;
}

/// Deterministic policy-gradient loss -mean Q(x, pi(x)) + l2 * mean(pi(x)^2)
/// for actor inputs `obs_goal` (normalized observation and goal rows). The
/// critic reads [obs_goal; action]. Fills actor gradients when non-null.
template <typename T>
T actor_loss(const Mlp<T>& actor, const Mlp<T>& critic, const typename Mlp<T>::Matrix& obs_goal,
             T action_l2, typename Mlp<T>::Gradients* grads) {
  using Matrix = typename Mlp<T>::Matrix;
  typename Mlp<T>::Tape actor_tape;
  typename Mlp<T>::Tape critic_tape;
  const Matrix action = actor.forward(obs_goal, actor_tape);
  Matrix critic_in(obs_goal.rows() + action.rows(), obs_goal.cols());
  critic_in << obs_goal, action;
  const Matrix q = critic.forward(critic_in, critic_tape);
  const T batch = static_cast<T>(obs_goal.cols());
  const T elems = static_cast<T>(action.size());
  const T loss = -q.sum() / batch + action_l2 * action.squaredNorm() / elems;
  if (grads) {
    const Matrix dq = Matrix::Constant(1, q.cols(), -T(1) / batch);
    const Matrix d_in = critic.backward(critic_tape, dq, nullptr);
    const Matrix d_action =
        d_in.bottomRows(action.rows()) + (T(2) * action_l2 / elems) * action;
    actor.backward(actor_tape, d_action, grads);
  }
  return loss;
}

/// DDPG actor-critic conditioned on the goal (UVFA inputs [s, g]).
class DdpgAgent {
 public:
  using Scalar = float;
  using Net = Mlp<Scalar>;

  DdpgAgent(EnvDims dims, AgentConfig config, std::uint64_t seed);

  /// Deterministic policy output in [-1, 1]^d_a.
  Action forward_actor(const State& state, const Goal& goal) const;
  double forward_critic(const State& state, const Action& action, const Goal& goal) const;

  /// Exploration: with probability random_action_prob a uniform action,
  /// otherwise the policy plus N(0, sigma) noise, clipped. Without
  /// exploration this is forward_actor().
  Action select_action(const State& state, const Goal& goal, bool explore, Rng& rng) const;

  /// One critic step, one actor step, then target averaging.
  UpdateReport update(std::span<const Transition> batch);

  void update_normalizer(std::span<const State> states, std::span<const Goal> goals);

  /// Bootstrapped targets r + gamma * Q'(s', pi'(s', g), g) clipped to
  /// [-1 / (1 - gamma), 0].
  std::vector<double> compute_targets(std::span<const Transition> batch) const;

  double target_clip_low() const { return -1.0 / (1.0 - config_.gamma); }

  const AgentConfig& config() const { return config_; }
  EnvDims dims() const { return dims_; }

  const Net& actor() const { return actor_; }
  const Net& critic() const { return critic_; }
  const Net& target_actor() const { return target_actor_; }
  const Net& target_critic() const { return target_critic_; }
  Net& actor() { return actor_; }
  Net& critic() { return critic_; }
  Net& target_actor() { return target_actor_; }
  Net& target_critic() { return target_critic_; }
  const RunningNormalizer& obs_normalizer() const { return obs_norm_; }
  const RunningNormalizer& goal_normalizer() const { return goal_norm_; }
  RunningNormalizer& obs_normalizer() { return obs_norm_; }
  RunningNormalizer& goal_normalizer() { return goal_norm_; }

  /// Normalized [s; g] columns for a batch.
  Net::Matrix actor_inputs(std::span<const State> states, std::span<const Goal> goals) const;

 private:
  void check_inputs(const State& state, const Goal& goal) const;

  EnvDims dims_;
  AgentConfig config_;
  Net actor_, critic_, target_actor_, target_critic_;
  Adam<Scalar> actor_opt_, critic_opt_;
  RunningNormalizer obs_norm_, goal_norm_;
};

/// Parameter checkpoint: networks and normalizers, little-endian.
///
///   magic "GCRLCKPT", u32 version (1), u32 scalar bytes (4)
///   u32 env-name length, env-name bytes
///   u32 d_s, u32 d_a, u32 d_g
///   f64 x 11: hidden, hidden_layers, gamma, polyak, lr_actor, lr_critic,
///             noise_sigma, random_action_prob, action_l2, norm_eps, norm_clip
///   4 networks (actor, critic, target actor, target critic), each:
///     u32 head, u32 layer count L, u32 dims[L + 1],
///     per layer: f32 weights row-major (out x in), f32 biases
///   2 normalizers (observation, goal), each:
///     u32 dim, f64 count, f64 sum[dim], f64 sumsq[dim]
void save_checkpoint(const DdpgAgent& agent, const std::string& env_name, const std::string& path);
std::vector<unsigned char> serialize_checkpoint(const DdpgAgent& agent, const std::string& env_name);

struct LoadedAgent {
  std::string env_name;
  DdpgAgent agent;
};
LoadedAgent load_checkpoint(const std::string& path);
LoadedAgent deserialize_checkpoint(std::span<const unsigned char> bytes);

}  // namespace gcrl

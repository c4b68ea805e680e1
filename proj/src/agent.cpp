#include "gcrl/agent.hpp"

#include <algorithm>
#include <cmath>

namespace gcrl {

RunningNormalizer::RunningNormalizer(std::size_t dim, double eps, double clip)
    : dim_(dim), eps_(eps), clip_(clip), sum_(dim, 0.0), sumsq_(dim, 0.0) {
  if (!(eps_ > 0.0)) throw ContractViolation("normalizer floor must be positive");
}

void RunningNormalizer::update(std::span<const double> x) {
  if (x.size() != dim_) throw ContractViolation("normalizer: dimension mismatch");
  require_finite(x, "normalizer");
  for (std::size_t i = 0; i < dim_; ++i) {
    sum_[i] += x[i];
    sumsq_[i] += x[i] * x[i];
  }
  count_ += 1.0;
}

std::vector<double> RunningNormalizer::mean() const {
  std::vector<double> m(dim_, 0.0);
  if (count_ > 0.0) {
    for (std::size_t i = 0; i < dim_; ++i) m[i] = sum_[i] / count_;
  }
  return m;
}

std::vector<double> RunningNormalizer::stddev() const {
  std::vector<double> s(dim_, 1.0);
  if (count_ > 0.0) {
    for (std::size_t i = 0; i < dim_; ++i) {
      const double m = sum_[i] / count_;
      const double var = std::max(0.0, sumsq_[i] / count_ - m * m);
      s[i] = std::max(std::sqrt(var), eps_);
    }
  }
  return s;
}

double RunningNormalizer::normalize_one(double x, std::size_t i) const {
  if (count_ <= 0.0) return std::clamp(x, -clip_, clip_);
  const double m = sum_[i] / count_;
  const double var = std::max(0.0, sumsq_[i] / count_ - m * m);
  const double s = std::max(std::sqrt(var), eps_);
  return std::clamp((x - m) / s, -clip_, clip_);
}

std::vector<double> RunningNormalizer::normalize(std::span<const double> x) const {
  if (x.size() != dim_) throw ContractViolation("normalizer: dimension mismatch");
  std::vector<double> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = normalize_one(x[i], i);
  return out;
}

void RunningNormalizer::restore(double count, std::vector<double> sum, std::vector<double> sumsq) {
  if (sum.size() != dim_ || sumsq.size() != dim_) {
    throw ContractViolation("normalizer: restore dimension mismatch");
  }
  count_ = count;
  sum_ = std::move(sum);
  sumsq_ = std::move(sumsq);
}

void AgentConfig::validate() const {
  if (hidden < 1 || hidden_layers < 1) throw ConfigError("network sizes must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(polyak > 0.0 && polyak <= 1.0)) throw ConfigError("polyak must lie in (0, 1]");
  if (!(lr_actor > 0.0) || !(lr_critic > 0.0)) throw ConfigError("learning rates must be > 0");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (!(random_action_prob >= 0.0 && random_action_prob <= 1.0)) {
    throw ConfigError("random action probability must lie in [0, 1]");
  }
  if (!(action_l2 >= 0.0)) throw ConfigError("action l2 must be >= 0");
  if (!(norm_eps > 0.0) || !(norm_clip > 0.0)) throw ConfigError("normalizer settings must be > 0");
}

namespace {

std::vector<int> layer_dims(int in, int hidden, int layers, int out) {
  std::vector<int> dims{in};
  for (int i = 0; i < layers; ++i) dims.push_back(hidden);
  dims.push_back(out);
  return dims;
}

}  // namespace

DdpgAgent::DdpgAgent(EnvDims dims, AgentConfig config, std::uint64_t seed)
    : dims_(dims), config_(config) {
  config_.validate();
  if (dims.state == 0 || dims.action == 0 || dims.goal == 0) {
    throw ContractViolation("agent: zero dimension");
  }
  const int ds = static_cast<int>(dims.state);
  const int da = static_cast<int>(dims.action);
  const int dg = static_cast<int>(dims.goal);
  actor_ = Net(layer_dims(ds + dg, config_.hidden, config_.hidden_layers, da), OutputActivation::Tanh);
  critic_ = Net(layer_dims(ds + dg + da, config_.hidden, config_.hidden_layers, 1),
                OutputActivation::Identity);
  Rng rng = make_rng(seed, {0xa9e47});
  actor_.init_glorot(rng);
  critic_.init_glorot(rng);
  if (config_.zero_init_output) {
    actor_.zero_output_layer();
    critic_.zero_output_layer();
  }
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = Adam<Scalar>(actor_, static_cast<Scalar>(config_.lr_actor));
  critic_opt_ = Adam<Scalar>(critic_, static_cast<Scalar>(config_.lr_critic));
  obs_norm_ = RunningNormalizer(dims.state, config_.norm_eps, config_.norm_clip);
  goal_norm_ = RunningNormalizer(dims.goal, config_.norm_eps, config_.norm_clip);
}

void DdpgAgent::check_inputs(const State& state, const Goal& goal) const {
  if (state.dim() != dims_.state || goal.dim() != dims_.goal) {
    throw ContractViolation("agent: input dimension mismatch");
  }
  require_finite(state.values, "agent state");
  require_finite(goal.coords, "agent goal");
}

DdpgAgent::Net::Matrix DdpgAgent::actor_inputs(std::span<const State> states,
                                               std::span<const Goal> goals) const {
  const Eigen::Index rows = static_cast<Eigen::Index>(dims_.state + dims_.goal);
  Net::Matrix x(rows, static_cast<Eigen::Index>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j) {
    Scalar* col = x.col(static_cast<Eigen::Index>(j)).data();
    obs_norm_.normalize_into(states[j].values, col);
    goal_norm_.normalize_into(goals[j].coords, col + dims_.state);
  }
  return x;
}

Action DdpgAgent::forward_actor(const State& state, const Goal& goal) const {
  check_inputs(state, goal);
  const auto x = actor_inputs(std::span(&state, 1), std::span(&goal, 1));
  const auto a = actor_.forward(x);
  Action out;
  out.values.resize(dims_.action);
  for (std::size_t i = 0; i < dims_.action; ++i) {
    out.values[i] = std::clamp(static_cast<double>(a(static_cast<Eigen::Index>(i), 0)), -1.0, 1.0);
  }
  return out;
}

double DdpgAgent::forward_critic(const State& state, const Action& action, const Goal& goal) const {
  check_inputs(state, goal);
  if (action.dim() != dims_.action) throw ContractViolation("agent: action dimension mismatch");
  require_finite(action.values, "agent action");
  const auto x = actor_inputs(std::span(&state, 1), std::span(&goal, 1));
  Net::Matrix in(x.rows() + static_cast<Eigen::Index>(dims_.action), 1);
  in.topRows(x.rows()) = x;
  for (std::size_t i = 0; i < dims_.action; ++i) {
    in(x.rows() + static_cast<Eigen::Index>(i), 0) = static_cast<Scalar>(action.values[i]);
  }
  return static_cast<double>(critic_.forward(in)(0, 0));
}

Action DdpgAgent::select_action(const State& state, const Goal& goal, bool explore, Rng& rng) const {
  Action a = forward_actor(state, goal);
  if (!explore) return a;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (config_.random_action_prob > 0.0 && unit(rng) < config_.random_action_prob) {
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    for (auto& v : a.values) v = box(rng);
    return a;
  }
  if (config_.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, config_.noise_sigma);
    for (auto& v : a.values) v = std::clamp(v + noise(rng), -1.0, 1.0);
  }
  return a;
}

void DdpgAgent::update_normalizer(std::span<const State> states, std::span<const Goal> goals) {
  for (const auto& s : states) obs_norm_.update(s.values);
  for (const auto& g : goals) goal_norm_.update(g.coords);
}

std::vector<double> DdpgAgent::compute_targets(std::span<const Transition> batch) const {
  std::vector<State> next;
  std::vector<Goal> goals;
  next.reserve(batch.size());
  goals.reserve(batch.size());
  for (const auto& t : batch) {
    check_inputs(t.next_state, t.goal);
    next.push_back(t.next_state);
    goals.push_back(t.goal);
  }
  const Net::Matrix x_next = actor_inputs(next, goals);
  const Net::Matrix a_next = target_actor_.forward(x_next);
  Net::Matrix in(x_next.rows() + a_next.rows(), x_next.cols());
  in << x_next, a_next;
  const Net::Matrix q_next = target_critic_.forward(in);
  std::vector<double> y(batch.size());
  const double lo = target_clip_low();
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const double raw = batch[j].reward + config_.gamma * static_cast<double>(q_next(0, static_cast<Eigen::Index>(j)));
    y[j] = std::clamp(raw, lo, 0.0);
  }
  return y;
}

UpdateReport DdpgAgent::update(std::span<const Transition> batch) {
  if (batch.empty()) throw ContractViolation("update: empty batch");
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index da = static_cast<Eigen::Index>(dims_.action);

  std::vector<State> states;
  std::vector<Goal> goals;
  states.reserve(batch.size());
  goals.reserve(batch.size());
  Net::Matrix actions(da, n);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Transition& t = batch[j];
    check_inputs(t.state, t.goal);
    if (t.action.dim() != dims_.action) throw ContractViolation("update: action dimension mismatch");
    if (t.reward != 0.0 && t.reward != -1.0) throw ContractViolation("update: reward must be 0 or -1");
    states.push_back(t.state);
    goals.push_back(t.goal);
    for (Eigen::Index i = 0; i < da; ++i) {
      actions(i, static_cast<Eigen::Index>(j)) = static_cast<Scalar>(t.action.values[static_cast<std::size_t>(i)]);
    }
  }

  const std::vector<double> y = compute_targets(batch);
  Net::Matrix targets(1, n);
  double target_sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    targets(0, j) = static_cast<Scalar>(y[static_cast<std::size_t>(j)]);
    target_sum += y[static_cast<std::size_t>(j)];
  }

  const Net::Matrix x = actor_inputs(states, goals);
  Net::Matrix critic_in(x.rows() + da, n);
  critic_in << x, actions;

  Net::Gradients critic_grads;
  Net::Gradients actor_grads;
  const Scalar c_loss = critic_loss<Scalar>(critic_, critic_in, targets, &critic_grads);
  const Scalar a_loss =
      actor_loss<Scalar>(actor_, critic_, x, static_cast<Scalar>(config_.action_l2), &actor_grads);
  if (!std::isfinite(c_loss) || !std::isfinite(a_loss)) {
    throw Error("update: non-finite loss (critic " + std::to_string(c_loss) + ", actor " +
                std::to_string(a_loss) + ")");
  }
  critic_opt_.step(critic_, critic_grads);
  actor_opt_.step(actor_, actor_grads);

  const Scalar polyak = static_cast<Scalar>(config_.polyak);
  target_actor_.polyak_from(actor_, polyak);
  target_critic_.polyak_from(critic_, polyak);

  UpdateReport report;
  report.critic_loss = static_cast<double>(c_loss);
  report.actor_loss = static_cast<double>(a_loss);
  report.mean_target_q = target_sum / static_cast<double>(n);
  return report;
}

}  // namespace gcrl

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gcrl {

/// Raised when a caller breaks a documented precondition (dimension
/// mismatch, non-finite input, out-of-range argument).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid user configuration (bad flag value, unknown env, bad radius).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runtime failure: empty buffers, I/O, diverged training.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Rng seeded from a base seed and a sequence of stream identifiers.
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> streams = {});

struct Goal {
  std::vector<double> coords;

  Goal() = default;
  explicit Goal(std::vector<double> c) : coords(std::move(c)) {}
  Goal(std::initializer_list<double> c) : coords(c) {}

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  bool operator==(const Goal&) const = default;
};

struct State {
  std::vector<double> values;

  State() = default;
  explicit State(std::vector<double> v) : values(std::move(v)) {}
  State(std::initializer_list<double> v) : values(v) {}

  std::size_t dim() const { return values.size(); }
  bool operator==(const State&) const = default;
};

struct Action {
  std::vector<double> values;

  Action() = default;
  explicit Action(std::vector<double> v) : values(std::move(v)) {}
  Action(std::initializer_list<double> v) : values(v) {}

  std::size_t dim() const { return values.size(); }
  bool operator==(const Action&) const = default;
};

enum class Metric { Euclidean };

struct RewardSpec {
  double delta = 0.05;
  Metric metric = Metric::Euclidean;

  RewardSpec() = default;
  explicit RewardSpec(double tolerance, Metric m = Metric::Euclidean);
};

/// One environment step (s, a, g, r, s').
struct Transition {
  State state;
  Action action;
  Goal goal;
  double reward = -1.0;
  State next_state;
};

/// A fixed-horizon episode. `achieved_goals[t]` is the goal-space image of
/// `transitions[t].next_state`. `desired_goal` is the goal the transitions
/// were collected under; `env_goal` is the goal the environment handed out at
/// reset (they differ when the curriculum replaced it).
struct Trajectory {
  std::vector<Transition> transitions;
  Goal desired_goal;
  Goal env_goal;
  std::vector<Goal> achieved_goals;

  std::size_t length() const { return transitions.size(); }
};

struct EnvDims {
  std::size_t state = 0;
  std::size_t action = 0;
  std::size_t goal = 0;
};

/// Euclidean distance; throws ContractViolation on dimension mismatch.
double distance(const Goal& a, const Goal& b);

/// 0 when the achieved goal is within `spec.delta` (inclusive) of the
/// desired goal, -1 otherwise.
double sparse_reward(const Goal& achieved, const Goal& desired, const RewardSpec& spec);

/// Writes a warning line to stderr unless warnings are silenced.
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);
/// Total warnings issued by this process.
std::size_t warning_count();

bool all_finite(std::span<const double> xs);
void require_finite(std::span<const double> xs, std::string_view what);
void require_same_dim(const Goal& a, const Goal& b, std::string_view what);

/// Goal-conditioned environment with a fixed horizon and sparse reward.
///
/// Implementations are single-owner and stateful. `goal_map` must be pure and
/// `reset` with equal seeds must reproduce identical episodes.
class Env {
 public:
  virtual ~Env() = default;

  virtual std::string_view name() const = 0;
  virtual EnvDims dims() const = 0;
  virtual RewardSpec reward_spec() const = 0;
  virtual int horizon() const = 0;

  virtual std::pair<State, Goal> reset(std::uint64_t seed) = 0;
  virtual State step(const Action& action) = 0;
  virtual Goal goal_map(const State& state) const = 0;
  virtual Goal sample_desired_goal(Rng& rng) const = 0;

  virtual std::unique_ptr<Env> clone() const = 0;

  /// Number of steps whose action had to be clipped into [-1, 1].
  std::size_t clipped_actions() const { return clipped_actions_; }

 protected:
  /// Clips into the action box, counting violations.
  Action clip_action(const Action& action);

 private:
  std::size_t clipped_actions_ = 0;
};

}  // namespace gcrl

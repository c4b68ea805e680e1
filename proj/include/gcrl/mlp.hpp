#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "gcrl/core.hpp"

namespace gcrl {

enum class OutputActivation : int { Identity = 0, Tanh = 1 };

/// Fully connected network with ReLU hidden layers. Samples are columns:
/// an input batch is (in_dim x batch).
template <typename T>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  /// Activations recorded by a forward pass, consumed by backward().
  struct Tape {
    std::vector<Matrix> inputs;  // input to each layer
    Matrix output;
  };

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    void resize_like(const Mlp& net) {
      weights.resize(net.layer_count());
      biases.resize(net.layer_count());
      for (std::size_t l = 0; l < net.layer_count(); ++l) {
        weights[l].setZero(net.weights_[l].rows(), net.weights_[l].cols());
        biases[l].setZero(net.biases_[l].size());
      }
    }
  };

  Mlp() = default;

  /// `dims` lists every layer width, input first and output last.
  Mlp(std::vector<int> dims, OutputActivation head) : dims_(std::move(dims)), head_(head) {
    if (dims_.size() < 2) throw ContractViolation("mlp needs at least input and output dims");
    for (int d : dims_) {
      if (d < 1) throw ContractViolation("mlp layer widths must be >= 1");
    }
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      weights_.push_back(Matrix::Zero(dims_[l + 1], dims_[l]));
      biases_.push_back(Vector::Zero(dims_[l + 1]));
    }
  }

  /// Glorot-uniform weights, zero biases.
  template <typename Gen>
  void init_glorot(Gen& rng) {
    for (auto& w : weights_) {
      const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
      std::uniform_real_distribution<double> u(-limit, limit);
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = static_cast<T>(u(rng));
      }
    }
    for (auto& b : biases_) b.setZero();
  }

  void zero_output_layer() {
    weights_.back().setZero();
    biases_.back().setZero();
  }

  Matrix forward(const Matrix& x) const {
    check_input(x);
    Matrix a = x;
    for (std::size_t l = 0; l < layer_count(); ++l) {
      Matrix z = weights_[l] * a;
      z.colwise() += biases_[l];
      a = activate(z, l);
    }
    return a;
  }

  Matrix forward(const Matrix& x, Tape& tape) const {
    check_input(x);
    tape.inputs.resize(layer_count());
    tape.inputs[0] = x;
    for (std::size_t l = 0; l < layer_count(); ++l) {
      Matrix z = weights_[l] * tape.inputs[l];
      z.colwise() += biases_[l];
      if (l + 1 < layer_count()) {
        tape.inputs[l + 1] = activate(z, l);
      } else {
        tape.output = activate(z, l);
      }
    }
    return tape.output;
  }

  /// Backpropagates `d_output` (dL/d output, same shape as the output).
  /// Overwrites `grads` when non-null and returns dL/d input.
  Matrix backward(const Tape& tape, const Matrix& d_output, Gradients* grads) const {
    if (grads) grads->resize_like(*this);
    // Through the head: both tanh and ReLU derivatives are expressible from
    // the layer output, so no pre-activations are stored.
    Matrix delta;
    if (head_ == OutputActivation::Tanh) {
      delta = d_output.array() * (T(1) - tape.output.array().square());
    } else {
      delta = d_output;
    }
    for (std::size_t l = layer_count(); l-- > 0;) {
      if (grads) {
        grads->weights[l].noalias() = delta * tape.inputs[l].transpose();
        grads->biases[l] = delta.rowwise().sum();
      }
      Matrix d_in = weights_[l].transpose() * delta;
      if (l == 0) return d_in;
      // inputs[l] = relu(z_{l-1}); derivative is 1 where the output is positive.
      delta = (tape.inputs[l].array() > T(0)).select(d_in, T(0));
    }
    return delta;
  }

  /// target <- polyak * target + (1 - polyak) * live, for every parameter.
  void polyak_from(const Mlp& live, T polyak) {
    for (std::size_t l = 0; l < layer_count(); ++l) {
      weights_[l] = polyak * weights_[l] + (T(1) - polyak) * live.weights_[l];
      biases_[l] = polyak * biases_[l] + (T(1) - polyak) * live.biases_[l];
    }
  }

  template <typename U>
  Mlp<U> cast() const {
    Mlp<U> out(dims_, head_);
    for (std::size_t l = 0; l < layer_count(); ++l) {
      out.weights()[l] = weights_[l].template cast<U>();
      out.biases()[l] = biases_[l].template cast<U>();
    }
    return out;
  }

  bool finite() const {
    for (std::size_t l = 0; l < layer_count(); ++l) {
      if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    }
    return true;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < layer_count(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
  }

  std::size_t layer_count() const { return weights_.size(); }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  const std::vector<int>& dims() const { return dims_; }
  OutputActivation head() const { return head_; }

  std::vector<Matrix>& weights() { return weights_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  const std::vector<Vector>& biases() const { return biases_; }

  bool operator==(const Mlp& o) const {
    if (dims_ != o.dims_ || head_ != o.head_) return false;
    for (std::size_t l = 0; l < layer_count(); ++l) {
      if (weights_[l] != o.weights_[l] || biases_[l] != o.biases_[l]) return false;
    }
    return true;
  }

 private:
  void check_input(const Matrix& x) const {
    if (x.rows() != dims_.front()) throw ContractViolation("mlp input dimension mismatch");
  }

  Matrix activate(const Matrix& z, std::size_t l) const {
    if (l + 1 < layer_count()) return z.cwiseMax(T(0));
    if (head_ == OutputActivation::Tanh) return z.array().tanh().matrix();
    return z;
  }

  std::vector<int> dims_;
  OutputActivation head_ = OutputActivation::Identity;
  std::vector<Matrix> weights_;  // out x in
  std::vector<Vector> biases_;
};

/// Adam with bias correction, one moment pair per parameter tensor.
template <typename T>
class Adam {
 public:
  using Net = Mlp<T>;

  Adam() = default;
  Adam(const Net& net, T learning_rate, T beta1 = T(0.9), T beta2 = T(0.999), T eps = T(1e-8))
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.resize_like(net);
    v_.resize_like(net);
  }

  void step(Net& net, const typename Net::Gradients& g) {
    ++t_;
    const T c1 = T(1) - std::pow(beta1_, static_cast<T>(t_));
    const T c2 = T(1) - std::pow(beta2_, static_cast<T>(t_));
    const T step = lr_ * std::sqrt(c2) / c1;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      update(net.weights()[l], m_.weights[l], v_.weights[l], g.weights[l], step);
      update(net.biases()[l], m_.biases[l], v_.biases[l], g.biases[l], step);
    }
  }

  long steps() const { return t_; }

 private:
  template <typename P, typename G>
  void update(P& p, P& m, P& v, const G& g, T step) {
    m = beta1_ * m + (T(1) - beta1_) * g;
    v = beta2_ * v + (T(1) - beta2_) * g.cwiseProduct(g);
    p.array() -= step * m.array() / (v.array().sqrt() + eps_);
  }

  T lr_ = T(1e-3), beta1_ = T(0.9), beta2_ = T(0.999), eps_ = T(1e-8);
  long t_ = 0;
  typename Net::Gradients m_, v_;
};

}  // namespace gcrl

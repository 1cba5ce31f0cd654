#pragma once

// A small dense neural-network engine: fully connected layers with
// tanh/sigmoid/identity activations, hand-written backpropagation, Adagrad,
// and a central-difference gradient checker.
//
// Batches are row-major matrices with one example per row.

#include "lgae/rng.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace lgae::nn {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Activation { identity, tanh, sigmoid };

std::string_view to_string(Activation a) noexcept;
Activation activation_from_string(std::string_view name);

struct LinearLayer {
  DenseMatrix W;  // out x in
  Vector b;
  DenseMatrix grad_W;
  Vector grad_b;
  Activation activation = Activation::identity;

  LinearLayer() = default;
  LinearLayer(Index in, Index out, Activation act);

  [[nodiscard]] Index in_dim() const noexcept { return W.cols(); }
  [[nodiscard]] Index out_dim() const noexcept { return W.rows(); }

  void zero_grad();
};

using Mlp = std::vector<LinearLayer>;

/// Builds layers sizes[0] -> sizes[1] -> ... with every weight and bias drawn
/// from N(0, stddev^2). activations has one entry per layer.
Mlp init_params(std::span<const Index> sizes, std::span<const Activation> activations, Rng& rng,
                double stddev = 0.1);

void zero_grad(Mlp& layers);

/// Per-layer values kept by forward() for backward().
struct ForwardCache {
  std::vector<DenseMatrix> inputs;       // input fed to layer l
  std::vector<DenseMatrix> pre;          // X W^T + b
  std::vector<DenseMatrix> activations;  // activation(pre)

  [[nodiscard]] const DenseMatrix& output() const { return activations.back(); }
};

ForwardCache forward(const Mlp& layers, const DenseMatrix& x);

/// Output-only forward pass (no cache).
DenseMatrix predict(const Mlp& layers, const DenseMatrix& x);

/// Accumulates parameter gradients into grad_W/grad_b (call zero_grad()
/// first at the start of a step) and returns the gradient with respect to
/// the input, or an empty matrix when need_input_grad is false. Throws
/// StaleCache when the cache does not match the layers or grad_out.
DenseMatrix backward(Mlp& layers, const ForwardCache& cache, const DenseMatrix& grad_out,
                     bool need_input_grad = true);

/// A contiguous run of parameters and the matching gradient storage.
struct ParamBlock {
  std::span<double> value;
  std::span<double> grad;
};

std::vector<ParamBlock> parameter_blocks(Mlp& layers);

struct AdagradState {
  double lr = 0.01;
  double eps = 1e-8;
  std::vector<std::vector<double>> acc;  // sized on the first step

  AdagradState() = default;
  AdagradState(double learning_rate, double epsilon) : lr(learning_rate), eps(epsilon) {}
};

/// acc += g^2; p -= lr * g / (sqrt(acc) + eps), elementwise.
void adagrad_step(std::span<const ParamBlock> params, AdagradState& state);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_block = 0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  bool passed = false;
};

/// Compares the analytic gradients already stored in blocks[i].grad against
/// central differences of loss(). The relative error of one coordinate is
/// |a - n| / max(|a|, |n|, floor).
GradCheckReport gradient_check(const std::function<double()>& loss,
                               std::span<const ParamBlock> blocks, double tolerance,
                               double h = 1e-5, double floor = 1e-5);

double sigmoid(double x) noexcept;

/// Binary cross-entropy of target x against sigmoid(logit), evaluated as
/// max(l, 0) - x l + log1p(exp(-|l|)).
double bce_with_logits(double target, double logit) noexcept;

}  // namespace lgae::nn

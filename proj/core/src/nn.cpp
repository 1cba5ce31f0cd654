#include "lgae/nn.hpp"

#include "lgae/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lgae::nn {

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  return "identity";
}

Activation activation_from_string(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  throw Error(ErrorCode::InvalidArgument, "unknown activation '" + std::string(name) + "'");
}

LinearLayer::LinearLayer(Index in, Index out, Activation act)
    : W(DenseMatrix::Zero(out, in)),
      b(Vector::Zero(out)),
      grad_W(DenseMatrix::Zero(out, in)),
      grad_b(Vector::Zero(out)),
      activation(act) {}

void LinearLayer::zero_grad() {
  grad_W.setZero();
  grad_b.setZero();
}

Mlp init_params(std::span<const Index> sizes, std::span<const Activation> activations, Rng& rng,
                double stddev) {
  if (sizes.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "init_params: need at least two layer sizes");
  }
  if (activations.size() != sizes.size() - 1) {
    throw Error(ErrorCode::DimensionMismatch, "init_params: one activation per layer");
  }
  Mlp layers;
  layers.reserve(sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    LinearLayer layer(sizes[l], sizes[l + 1], activations[l]);
    for (Index i = 0; i < layer.W.size(); ++i) layer.W.data()[i] = stddev * rng.normal();
    for (Index i = 0; i < layer.b.size(); ++i) layer.b[i] = stddev * rng.normal();
    layers.push_back(std::move(layer));
  }
  return layers;
}

void zero_grad(Mlp& layers) {
  for (auto& layer : layers) layer.zero_grad();
}

namespace {

void apply_activation(Activation act, const DenseMatrix& pre, DenseMatrix& out) {
  switch (act) {
    case Activation::identity: out = pre; break;
    case Activation::tanh: out = pre.array().tanh().matrix(); break;
    case Activation::sigmoid: out = pre.unaryExpr([](double v) { return sigmoid(v); }); break;
  }
}

void check_input(const LinearLayer& layer, const DenseMatrix& x) {
  if (x.cols() != layer.in_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "forward: input width " + std::to_string(x.cols()) + ", layer expects " +
                    std::to_string(layer.in_dim()));
  }
}

}  // namespace

ForwardCache forward(const Mlp& layers, const DenseMatrix& x) {
  ForwardCache cache;
  cache.inputs.reserve(layers.size());
  cache.pre.reserve(layers.size());
  cache.activations.reserve(layers.size());
  const DenseMatrix* input = &x;
  for (const auto& layer : layers) {
    check_input(layer, *input);
    cache.inputs.push_back(*input);
    DenseMatrix pre = (*input) * layer.W.transpose();
    pre.rowwise() += layer.b.transpose();
    DenseMatrix act;
    apply_activation(layer.activation, pre, act);
    cache.pre.push_back(std::move(pre));
    cache.activations.push_back(std::move(act));
    input = &cache.activations.back();
  }
  return cache;
}

DenseMatrix predict(const Mlp& layers, const DenseMatrix& x) {
  DenseMatrix current = x;
  for (const auto& layer : layers) {
    check_input(layer, current);
    DenseMatrix pre = current * layer.W.transpose();
    pre.rowwise() += layer.b.transpose();
    apply_activation(layer.activation, pre, current);
  }
  return current;
}

DenseMatrix backward(Mlp& layers, const ForwardCache& cache, const DenseMatrix& grad_out,
                     bool need_input_grad) {
  if (cache.activations.size() != layers.size() || cache.inputs.size() != layers.size() ||
      cache.pre.size() != layers.size() || layers.empty()) {
    throw Error(ErrorCode::StaleCache, "backward: cache does not match network depth");
  }
  const Index batch = cache.inputs.front().rows();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (cache.inputs[l].cols() != layer.in_dim() || cache.inputs[l].rows() != batch ||
        cache.activations[l].cols() != layer.out_dim() ||
        cache.activations[l].rows() != batch) {
      throw Error(ErrorCode::StaleCache, "backward: cache shapes disagree with the layers");
    }
  }
  if (grad_out.rows() != batch || grad_out.cols() != layers.back().out_dim()) {
    throw Error(ErrorCode::StaleCache, "backward: output gradient shape disagrees with cache");
  }

  DenseMatrix grad = grad_out;
  for (std::size_t l = layers.size(); l-- > 0;) {
    auto& layer = layers[l];
    const auto& a = cache.activations[l];
    switch (layer.activation) {
      case Activation::identity: break;
      case Activation::tanh: grad.array() *= 1.0 - a.array().square(); break;
      case Activation::sigmoid: grad.array() *= a.array() * (1.0 - a.array()); break;
    }
    layer.grad_W.noalias() += grad.transpose() * cache.inputs[l];
    layer.grad_b.noalias() += grad.colwise().sum().transpose();
    if (l == 0 && !need_input_grad) return {};
    grad = (grad * layer.W).eval();
  }
  return grad;
}

std::vector<ParamBlock> parameter_blocks(Mlp& layers) {
  std::vector<ParamBlock> blocks;
  blocks.reserve(2 * layers.size());
  for (auto& layer : layers) {
    const auto w = static_cast<std::size_t>(layer.W.size());
    const auto b = static_cast<std::size_t>(layer.b.size());
    blocks.push_back({{layer.W.data(), w}, {layer.grad_W.data(), w}});
    blocks.push_back({{layer.b.data(), b}, {layer.grad_b.data(), b}});
  }
  return blocks;
}

void adagrad_step(std::span<const ParamBlock> params, AdagradState& state) {
  if (state.acc.empty()) {
    state.acc.reserve(params.size());
    for (const auto& p : params) state.acc.emplace_back(p.value.size(), 0.0);
  }
  if (state.acc.size() != params.size()) {
    throw Error(ErrorCode::DimensionMismatch, "adagrad_step: parameter block count changed");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& acc = state.acc[i];
    const auto& p = params[i];
    if (acc.size() != p.value.size() || p.grad.size() != p.value.size()) {
      throw Error(ErrorCode::DimensionMismatch, "adagrad_step: block shape changed");
    }
    for (std::size_t j = 0; j < acc.size(); ++j) {
      const double g = p.grad[j];
      acc[j] += g * g;
      p.value[j] -= state.lr * g / (std::sqrt(acc[j]) + state.eps);
    }
  }
}

GradCheckReport gradient_check(const std::function<double()>& loss,
                               std::span<const ParamBlock> blocks, double tolerance, double h,
                               double floor) {
  GradCheckReport report;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const auto& block = blocks[bi];
    for (std::size_t j = 0; j < block.value.size(); ++j) {
      double& p = block.value[j];
      const double saved = p;
      p = saved + h;
      const double up = loss();
      p = saved - h;
      const double down = loss();
      p = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = block.grad[j];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
      const double rel = std::abs(analytic - numeric) / denom;
      ++report.checked;
      if (!(rel <= report.max_rel_error)) {
        report.max_rel_error = rel;
        report.worst_block = bi;
        report.worst_index = j;
      }
    }
  }
  report.passed = report.max_rel_error < tolerance;
  return report;
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bce_with_logits(double target, double logit) noexcept {
  return std::max(logit, 0.0) - target * logit + std::log1p(std::exp(-std::abs(logit)));
}

}  // namespace lgae::nn

#include "lgae/models.hpp"

#include "lgae/error.hpp"
#include "lgae/liegroup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace lgae::models {

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::lgae: return "lgae";
    case Variant::lgae_kl: return "lgae_kl";
    case Variant::vae: return "vae";
  }
  return "lgae";
}

Variant variant_from_string(std::string_view name) {
  if (name == "lgae") return Variant::lgae;
  if (name == "lgae_kl" || name == "lgae-kl") return Variant::lgae_kl;
  if (name == "vae") return Variant::vae;
  throw Error(ErrorCode::InvalidArgument, "unknown variant '" + std::string(name) + "'");
}

std::string_view to_string(RepresentationKind k) noexcept {
  switch (k) {
    case RepresentationKind::mu: return "mu";
    case RepresentationKind::mu_concat_sigma: return "mu_concat_sigma";
    case RepresentationKind::lie_algebra: return "lie_algebra";
  }
  return "mu";
}

RepresentationKind representation_from_string(std::string_view name) {
  if (name == "mu") return RepresentationKind::mu;
  if (name == "mu_concat_sigma") return RepresentationKind::mu_concat_sigma;
  if (name == "lie_algebra" || name == "g") return RepresentationKind::lie_algebra;
  throw Error(ErrorCode::InvalidArgument, "unknown representation '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

Model::Model(Variant variant, ModelShape shape, double lambda, Rng& rng, double init_stddev)
    : variant_(variant), lambda_(lambda), latent_(shape.latent), input_dim_(shape.input_dim) {
  if (shape.latent < 1 || shape.hidden < 1 || shape.input_dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "Model: dimensions must be positive");
  }
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Model: lambda must be >= 0");
  using nn::Activation;
  const std::array<Index, 3> enc_sizes{shape.input_dim, shape.hidden, 2 * shape.latent};
  const std::array<Index, 3> dec_sizes{shape.latent, shape.hidden, shape.input_dim};
  const std::array<Activation, 2> acts{Activation::tanh, Activation::identity};
  encoder_ = nn::init_params(enc_sizes, acts, rng, init_stddev);
  decoder_ = nn::init_params(dec_sizes, acts, rng, init_stddev);
}

Model::Model(Variant variant, double lambda, nn::Mlp encoder, nn::Mlp decoder)
    : variant_(variant), lambda_(lambda), encoder_(std::move(encoder)), decoder_(std::move(decoder)) {
  if (encoder_.empty() || decoder_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "Model: encoder and decoder must be non-empty");
  }
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Model: lambda must be >= 0");
  latent_ = decoder_.front().in_dim();
  input_dim_ = encoder_.front().in_dim();
  if (encoder_.back().out_dim() != 2 * latent_ || decoder_.back().out_dim() != input_dim_) {
    throw Error(ErrorCode::DimensionMismatch,
                "Model: encoder must emit 2K values and decoder must emit D values");
  }
  for (std::size_t l = 1; l < encoder_.size(); ++l) {
    if (encoder_[l].in_dim() != encoder_[l - 1].out_dim()) {
      throw Error(ErrorCode::DimensionMismatch, "Model: encoder layers do not chain");
    }
  }
  for (std::size_t l = 1; l < decoder_.size(); ++l) {
    if (decoder_[l].in_dim() != decoder_[l - 1].out_dim()) {
      throw Error(ErrorCode::DimensionMismatch, "Model: decoder layers do not chain");
    }
  }
}

std::vector<nn::ParamBlock> Model::parameter_blocks() {
  auto blocks = nn::parameter_blocks(encoder_);
  auto dec = nn::parameter_blocks(decoder_);
  blocks.insert(blocks.end(), dec.begin(), dec.end());
  return blocks;
}

void Model::zero_grad() {
  nn::zero_grad(encoder_);
  nn::zero_grad(decoder_);
}

// ---------------------------------------------------------------------------
// Forward

DenseMatrix encode(const Model& model, const DenseMatrix& x) {
  if (x.cols() != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "encode: input width " + std::to_string(x.cols()) +
                                                  ", model expects " +
                                                  std::to_string(model.input_dim()));
  }
  return nn::predict(model.encoder(), x);
}

Posterior posterior_from_raw(Variant variant, const DenseMatrix& raw) {
  if (raw.cols() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "posterior: encoder output width must be even");
  }
  const Index k = raw.cols() / 2;
  Posterior post{raw, DenseMatrix(raw.rows(), k), DenseMatrix(raw.rows(), k)};
  for (Index i = 0; i < raw.rows(); ++i) {
    for (Index j = 0; j < k; ++j) {
      const double a = raw(i, j);
      const double b = raw(i, k + j);
      if (uses_exp_mapping(variant)) {
        // sigma = e^phi, mu = theta (e^phi - 1) / phi
        post.sigma(i, j) = std::exp(a);
        post.mu(i, j) = b * liegroup::expm1_ratio(a);
      } else {
        post.mu(i, j) = a;
        post.sigma(i, j) = std::exp(0.5 * b);
      }
    }
  }
  return post;
}

namespace {

void sigmoid_into(const DenseMatrix& logits, DenseMatrix& out) {
  out = logits.unaryExpr([](double v) { return nn::sigmoid(v); });
}

}  // namespace

ForwardPass reconstruct(const Model& model, const DenseMatrix& x, const DenseMatrix& noise) {
  if (x.cols() != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "reconstruct: input width mismatch");
  }
  const Index batch = x.rows();
  if (batch == 0 || noise.rows() % batch != 0 || noise.cols() != model.latent()) {
    throw Error(ErrorCode::DimensionMismatch, "reconstruct: noise must be (B m) x K");
  }
  ForwardPass pass;
  pass.samples_per_input = static_cast<int>(noise.rows() / batch);
  pass.encoder_cache = nn::forward(model.encoder(), x);
  pass.posterior = posterior_from_raw(model.variant(), pass.encoder_cache.output());
  pass.noise = noise;

  const int m = pass.samples_per_input;
  const auto& post = pass.posterior;
  pass.z.resize(noise.rows(), noise.cols());
  for (Index r = 0; r < noise.rows(); ++r) {
    const Index i = r / m;
    pass.z.row(r) = post.sigma.row(i).cwiseProduct(noise.row(r)) + post.mu.row(i);
  }
  pass.decoder_cache = nn::forward(model.decoder(), pass.z);
  pass.logits = pass.decoder_cache.output();
  sigmoid_into(pass.logits, pass.x_hat);
  return pass;
}

ForwardPass reconstruct(const Model& model, const DenseMatrix& x, Rng& rng, int samples_per_input) {
  if (samples_per_input < 1) {
    throw Error(ErrorCode::InvalidArgument, "reconstruct: samples_per_input must be >= 1");
  }
  DenseMatrix noise(x.rows() * samples_per_input, model.latent());
  for (Index i = 0; i < noise.size(); ++i) noise.data()[i] = rng.normal();
  return reconstruct(model, x, noise);
}

DenseMatrix decode(const Model& model, const DenseMatrix& z) {
  if (z.cols() != model.latent()) {
    throw Error(ErrorCode::DimensionMismatch, "decode: latent width mismatch");
  }
  DenseMatrix out;
  sigmoid_into(nn::predict(model.decoder(), z), out);
  return out;
}

// ---------------------------------------------------------------------------
// Losses

double reconstruction_loss(const DenseMatrix& x, const DenseMatrix& logits, int samples_per_input) {
  if (logits.cols() != x.cols() || logits.rows() != x.rows() * samples_per_input) {
    throw Error(ErrorCode::DimensionMismatch, "reconstruction_loss: shape mismatch");
  }
  double total = 0.0;
  for (Index r = 0; r < logits.rows(); ++r) {
    const Index i = r / samples_per_input;
    for (Index d = 0; d < logits.cols(); ++d) total += nn::bce_with_logits(x(i, d), logits(r, d));
  }
  return total / static_cast<double>(logits.rows());
}

LossParts loss_lgae(const DenseMatrix& x, const DenseMatrix& logits, const DenseMatrix& tangents,
                    double lambda, int samples_per_input) {
  if (tangents.rows() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "loss_lgae: one tangent per example");
  }
  LossParts parts;
  parts.rec = reconstruction_loss(x, logits, samples_per_input);
  parts.reg = tangents.squaredNorm() / static_cast<double>(tangents.rows());
  parts.total = lambda * parts.reg + parts.rec;
  return parts;
}

LossParts loss_kl(const DenseMatrix& x, const DenseMatrix& logits, const DenseMatrix& mu,
                  const DenseMatrix& sigma, int samples_per_input) {
  if (mu.rows() != x.rows() || sigma.rows() != x.rows() || mu.cols() != sigma.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "loss_kl: one Gaussian per example");
  }
  LossParts parts;
  parts.rec = reconstruction_loss(x, logits, samples_per_input);
  double kl = 0.0;
  for (Index i = 0; i < mu.size(); ++i) {
    const double m = mu.data()[i];
    const double s = sigma.data()[i];
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "loss_kl: sigma must be positive");
    kl += 0.5 * (m * m + s * s - 1.0 - 2.0 * std::log(s));
  }
  parts.reg = kl / static_cast<double>(mu.rows());
  parts.total = parts.reg + parts.rec;
  return parts;
}

LossParts compute_loss(const Model& model, const DenseMatrix& x, const ForwardPass& pass) {
  if (model.variant() == Variant::lgae) {
    return loss_lgae(x, pass.logits, pass.posterior.raw, model.lambda(), pass.samples_per_input);
  }
  return loss_kl(x, pass.logits, pass.posterior.mu, pass.posterior.sigma, pass.samples_per_input);
}

// ---------------------------------------------------------------------------
// Backward

LossParts backward(Model& model, const DenseMatrix& x, const ForwardPass& pass) {
  const LossParts parts = compute_loss(model, x, pass);
  model.zero_grad();

  const Index batch = x.rows();
  const Index k = model.latent();
  const int m = pass.samples_per_input;
  const double rows = static_cast<double>(pass.logits.rows());
  const double inv_batch = 1.0 / static_cast<double>(batch);

  // d rec / d logits = (sigmoid(l) - x) / rows
  DenseMatrix grad_logits(pass.logits.rows(), pass.logits.cols());
  for (Index r = 0; r < grad_logits.rows(); ++r) {
    const Index i = r / m;
    grad_logits.row(r) = (pass.x_hat.row(r) - x.row(i)) / rows;
  }
  const DenseMatrix grad_z = nn::backward(model.decoder(), pass.decoder_cache, grad_logits);

  // Sampling layer: z = sigma * v + mu.
  const auto& post = pass.posterior;
  DenseMatrix grad_mu = DenseMatrix::Zero(batch, k);
  DenseMatrix grad_sigma = DenseMatrix::Zero(batch, k);
  for (Index r = 0; r < grad_z.rows(); ++r) {
    const Index i = r / m;
    grad_mu.row(i) += grad_z.row(r);
    grad_sigma.row(i) += grad_z.row(r).cwiseProduct(pass.noise.row(r));
  }

  if (model.variant() != Variant::lgae) {
    // KL: d/dmu = mu / B, d/dsigma = (sigma - 1/sigma) / B
    grad_mu += post.mu * inv_batch;
    grad_sigma.array() += (post.sigma.array() - post.sigma.array().inverse()) * inv_batch;
  }

  DenseMatrix grad_raw(batch, 2 * k);
  for (Index i = 0; i < batch; ++i) {
    for (Index j = 0; j < k; ++j) {
      const double a = post.raw(i, j);
      const double b = post.raw(i, k + j);
      if (uses_exp_mapping(model.variant())) {
        const double dsigma_dphi = post.sigma(i, j);
        const double dmu_dphi = b * liegroup::expm1_ratio_derivative(a);
        const double dmu_dtheta = liegroup::expm1_ratio(a);
        grad_raw(i, j) = grad_sigma(i, j) * dsigma_dphi + grad_mu(i, j) * dmu_dphi;
        grad_raw(i, k + j) = grad_mu(i, j) * dmu_dtheta;
      } else {
        grad_raw(i, j) = grad_mu(i, j);
        grad_raw(i, k + j) = grad_sigma(i, j) * 0.5 * post.sigma(i, j);
      }
    }
  }
  if (model.variant() == Variant::lgae) {
    grad_raw += post.raw * (2.0 * model.lambda() * inv_batch);
  }

  nn::backward(model.encoder(), pass.encoder_cache, grad_raw, false);
  return parts;
}

// ---------------------------------------------------------------------------
// Loops

namespace {

DenseMatrix gather_rows(const DenseMatrix& source, std::span<const std::size_t> indices) {
  DenseMatrix out(static_cast<Index>(indices.size()), source.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.row(static_cast<Index>(r)) = source.row(static_cast<Index>(indices[r]));
  }
  return out;
}

void check_loop_args(const data::Dataset& data, std::size_t batch_size) {
  if (data.size() == 0) throw Error(ErrorCode::EmptyBatch, "dataset is empty");
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
}

void accumulate(EpochMetrics& acc, const LossParts& parts, double weight) {
  acc.total += parts.total * weight;
  acc.rec += parts.rec * weight;
  acc.reg += parts.reg * weight;
}

void finish(EpochMetrics& acc, double count) {
  acc.total /= count;
  acc.rec /= count;
  acc.reg /= count;
  if (!std::isfinite(acc.total)) throw Error(ErrorCode::NumericFailure, "non-finite loss");
}

}  // namespace

EpochMetrics train_epoch(Model& model, const data::Dataset& data, nn::AdagradState& state, Rng& rng,
                         std::size_t batch_size, int samples_per_input) {
  check_loop_args(data, batch_size);
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  auto blocks = model.parameter_blocks();
  EpochMetrics metrics;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t count = std::min(batch_size, n - start);
    const DenseMatrix x = gather_rows(data.X, std::span(order).subspan(start, count));
    const ForwardPass pass = reconstruct(model, x, rng, samples_per_input);
    const LossParts parts = backward(model, x, pass);
    if (!std::isfinite(parts.total)) {
      throw Error(ErrorCode::NumericFailure, "non-finite training loss");
    }
    nn::adagrad_step(blocks, state);
    accumulate(metrics, parts, static_cast<double>(count));
  }
  finish(metrics, static_cast<double>(n));
  return metrics;
}

EpochMetrics eval_loss(const Model& model, const data::Dataset& data, Rng& rng,
                       std::size_t batch_size, int samples_per_input) {
  check_loop_args(data, batch_size);
  const std::size_t n = data.size();
  EpochMetrics metrics;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const auto count = static_cast<Index>(std::min(batch_size, n - start));
    const DenseMatrix x = data.X.middleRows(static_cast<Index>(start), count);
    const ForwardPass pass = reconstruct(model, x, rng, samples_per_input);
    accumulate(metrics, compute_loss(model, x, pass), static_cast<double>(count));
  }
  finish(metrics, static_cast<double>(n));
  return metrics;
}

Representation extract_representation(const Model& model, const DenseMatrix& x,
                                      RepresentationKind kind, std::size_t batch_size) {
  if (kind == RepresentationKind::lie_algebra && !uses_exp_mapping(model.variant())) {
    throw Error(ErrorCode::UnsupportedKind, "vae has no Lie-algebra representation");
  }
  if (batch_size == 0) batch_size = static_cast<std::size_t>(std::max<Index>(x.rows(), 1));
  const Index k = model.latent();
  const Index width = kind == RepresentationKind::mu ? k : 2 * k;
  Representation rep{kind, DenseMatrix(x.rows(), width)};
  for (Index start = 0; start < x.rows(); start += static_cast<Index>(batch_size)) {
    const Index count = std::min<Index>(static_cast<Index>(batch_size), x.rows() - start);
    const Posterior post = posterior_from_raw(model.variant(), encode(model, x.middleRows(start, count)));
    auto out = rep.vectors.middleRows(start, count);
    switch (kind) {
      case RepresentationKind::mu: out = post.mu; break;
      case RepresentationKind::mu_concat_sigma:
        out.leftCols(k) = post.mu;
        out.rightCols(k) = post.sigma;
        break;
      case RepresentationKind::lie_algebra: out = post.raw; break;
    }
  }
  return rep;
}

}  // namespace lgae::models

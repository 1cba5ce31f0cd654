#pragma once

#include "lgae/data.hpp"
#include "lgae/nn.hpp"
#include "lgae/rng.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace lgae::models {

using nn::DenseMatrix;
using nn::Index;

/// lgae:    encoder -> (phi, theta) -> exponential mapping -> sample; lambda * L_LG + L_rec
/// lgae_kl: same pipeline; KL + L_rec
/// vae:     encoder -> (mu, log sigma^2) -> sample; KL + L_rec
enum class Variant { lgae, lgae_kl, vae };

std::string_view to_string(Variant v) noexcept;
Variant variant_from_string(std::string_view name);

[[nodiscard]] constexpr bool uses_exp_mapping(Variant v) noexcept { return v != Variant::vae; }

enum class RepresentationKind { mu, mu_concat_sigma, lie_algebra };

std::string_view to_string(RepresentationKind k) noexcept;
RepresentationKind representation_from_string(std::string_view name);

struct ModelShape {
  Index input_dim = 784;
  Index hidden = 500;
  Index latent = 10;
};

/// Encoder D -> hidden (tanh) -> 2K (identity); decoder K -> hidden (tanh)
/// -> D (identity logits, squashed by a sigmoid in the loss).
class Model {
 public:
  Model(Variant variant, ModelShape shape, double lambda, Rng& rng, double init_stddev = 0.1);
  Model(Variant variant, double lambda, nn::Mlp encoder, nn::Mlp decoder);

  [[nodiscard]] Variant variant() const noexcept { return variant_; }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] Index latent() const noexcept { return latent_; }
  [[nodiscard]] Index input_dim() const noexcept { return input_dim_; }

  [[nodiscard]] const nn::Mlp& encoder() const noexcept { return encoder_; }
  [[nodiscard]] const nn::Mlp& decoder() const noexcept { return decoder_; }
  nn::Mlp& encoder() noexcept { return encoder_; }
  nn::Mlp& decoder() noexcept { return decoder_; }

  /// Encoder blocks followed by decoder blocks.
  std::vector<nn::ParamBlock> parameter_blocks();
  void zero_grad();

 private:
  Variant variant_;
  double lambda_;
  Index latent_;
  Index input_dim_;
  nn::Mlp encoder_;
  nn::Mlp decoder_;
};

/// Gaussian parameters for every example of a batch, derived from the raw
/// 2K-wide encoder output.
struct Posterior {
  DenseMatrix raw;    // phi | theta, or mu | log sigma^2 for vae
  DenseMatrix mu;     // B x K
  DenseMatrix sigma;  // B x K
};

/// Raw encoder output, B x 2K.
DenseMatrix encode(const Model& model, const DenseMatrix& x);

Posterior posterior_from_raw(Variant variant, const DenseMatrix& raw);

struct ForwardPass {
  nn::ForwardCache encoder_cache;
  nn::ForwardCache decoder_cache;
  Posterior posterior;
  DenseMatrix noise;   // (B m) x K; row i*m + j is draw j of example i
  DenseMatrix z;       // (B m) x K
  DenseMatrix logits;  // (B m) x D
  DenseMatrix x_hat;   // sigmoid(logits)
  int samples_per_input = 1;
};

/// x -> g -> G -> z = sigma * v + mu -> x_hat with the given noise v.
ForwardPass reconstruct(const Model& model, const DenseMatrix& x, const DenseMatrix& noise);
/// As above with m fresh standard-normal draws per example.
ForwardPass reconstruct(const Model& model, const DenseMatrix& x, Rng& rng, int samples_per_input = 1);

struct LossParts {
  double total = 0.0;
  double rec = 0.0;
  double reg = 0.0;  // intrinsic loss for lgae, KL otherwise
};

/// Binary cross-entropy summed over D, averaged over rows. Row r of logits
/// is compared with row r / samples_per_input of x.
double reconstruction_loss(const DenseMatrix& x, const DenseMatrix& logits,
                           int samples_per_input = 1);

/// rec + lambda * mean_i sum_k (phi_ik^2 + theta_ik^2). tangents is B x 2K
/// holding phi | theta.
LossParts loss_lgae(const DenseMatrix& x, const DenseMatrix& logits, const DenseMatrix& tangents,
                    double lambda, int samples_per_input = 1);

/// rec + mean_i 1/2 sum_k (mu^2 + sigma^2 - 1 - log sigma^2).
LossParts loss_kl(const DenseMatrix& x, const DenseMatrix& logits, const DenseMatrix& mu,
                  const DenseMatrix& sigma, int samples_per_input = 1);

LossParts compute_loss(const Model& model, const DenseMatrix& x, const ForwardPass& pass);

/// Zeroes the model gradients, then fills them with d(total)/d(params) for
/// the given pass, treating the noise as constant. Returns the loss.
LossParts backward(Model& model, const DenseMatrix& x, const ForwardPass& pass);

struct EpochMetrics {
  double total = 0.0;
  double rec = 0.0;
  double reg = 0.0;
};

/// One Fisher-Yates shuffled pass of Adagrad steps; returns example-weighted
/// mean losses of the minibatches as they were trained. Throws
/// NumericFailure on a non-finite loss.
EpochMetrics train_epoch(Model& model, const data::Dataset& data, nn::AdagradState& state, Rng& rng,
                         std::size_t batch_size, int samples_per_input = 1);

/// Mean loss over the dataset in storage order, without touching parameters.
EpochMetrics eval_loss(const Model& model, const data::Dataset& data, Rng& rng,
                       std::size_t batch_size, int samples_per_input = 1);

struct Representation {
  RepresentationKind kind;
  DenseMatrix vectors;
};

/// Deterministic latent codes: mu (K wide), mu | sigma (2K), or phi | theta
/// (2K, mapping variants only; UnsupportedKind for vae).
Representation extract_representation(const Model& model, const DenseMatrix& x,
                                      RepresentationKind kind, std::size_t batch_size = 1000);

/// Decodes latent vectors to pixel probabilities.
DenseMatrix decode(const Model& model, const DenseMatrix& z);

}  // namespace lgae::models

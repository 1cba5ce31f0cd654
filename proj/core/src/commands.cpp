#include "lgae/commands.hpp"

#include "lgae/error.hpp"
#include "lgae/eval.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace lgae::cli {

namespace {

// Independent RNG streams derived from the run seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kBlobsTrainStream = 2;
constexpr std::uint64_t kBlobsTestStream = 3;
constexpr std::uint64_t kEvalStreamBase = 1'000'000;

int image_side(nn::Index dim) {
  const auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
  if (static_cast<nn::Index>(side) * side != dim) {
    throw Error(ErrorCode::DimensionMismatch, "input dimension is not a square image");
  }
  return side;
}

}  // namespace

DataSplits load_data(const TrainConfig& config) {
  config.validate();
  DataSplits splits;
  if (config.dataset == "blobs") {
    Rng train_rng(derive_seed(config.blobs_seed, kBlobsTrainStream));
    Rng test_rng(derive_seed(config.blobs_seed, kBlobsTestStream));
    splits.train = data::synthetic_blobs(train_rng, config.blobs_train, config.blobs_dim,
                                         config.blobs_classes);
    splits.test = data::synthetic_blobs(test_rng, config.blobs_test, config.blobs_dim,
                                        config.blobs_classes);
  } else {
    splits.train = data::load_mnist(config.data_dir, data::Split::train);
    splits.test = data::load_mnist(config.data_dir, data::Split::test);
  }
  splits.train = splits.train.head(config.train_limit);
  splits.test = splits.test.head(config.test_limit);
  return splits;
}

Checkpoint initial_checkpoint(const TrainConfig& config, std::size_t input_dim) {
  config.validate();
  Rng init_rng(derive_seed(config.seed, kInitStream));
  models::ModelShape shape{static_cast<nn::Index>(input_dim), config.hidden, config.k};
  models::Model model(config.variant, shape, config.lambda, init_rng);
  return Checkpoint{config, 0, Rng(derive_seed(config.seed, kTrainStream)).state(),
                    std::move(model), nn::AdagradState(config.lr, 1e-8), {}};
}

void train_until(Checkpoint& ckpt, const DataSplits& data, int target_epoch, std::ostream* log) {
  const auto& cfg = ckpt.config;
  Rng rng;
  rng.set_state(ckpt.rng_state);
  for (int epoch = ckpt.epoch + 1; epoch <= target_epoch; ++epoch) {
    models::EpochMetrics train;
    models::EpochMetrics test;
    try {
      train = models::train_epoch(ckpt.model, data.train, ckpt.optimizer, rng, cfg.batch_size,
                                  cfg.samples_per_input);
      Rng eval_rng(derive_seed(cfg.seed, kEvalStreamBase + static_cast<std::uint64_t>(epoch)));
      test = models::eval_loss(ckpt.model, data.test, eval_rng, cfg.batch_size,
                               cfg.samples_per_input);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NumericFailure) {
        throw Error(ErrorCode::NumericFailure, "epoch " + std::to_string(epoch) + ": " + e.what());
      }
      throw;
    }
    ckpt.curve.push_back({epoch, train.total, train.rec, train.reg, test.total});
    ckpt.epoch = epoch;
    ckpt.rng_state = rng.state();
    if (log != nullptr) {
      *log << "epoch " << epoch << "  train " << std::setprecision(6) << train.total
           << " (rec " << train.rec << ", reg " << train.reg << ")  test " << test.total
           << std::endl;
    }
  }
}

Checkpoint cmd_train(const TrainConfig& config, std::ostream* log,
                     const std::optional<std::filesystem::path>& resume) {
  config.validate();
  const DataSplits data = load_data(config);
  Checkpoint ckpt = resume ? load_checkpoint(*resume) : initial_checkpoint(config, data.train.dim());
  if (resume) {
    if (ckpt.model.input_dim() != static_cast<nn::Index>(data.train.dim())) {
      throw Error(ErrorCode::DimensionMismatch, "resume: checkpoint input width differs from data");
    }
    ckpt.config.epochs = config.epochs;
    ckpt.config.out_dir = config.out_dir;
  }
  train_until(ckpt, data, ckpt.config.epochs, log);

  const std::filesystem::path out_dir = config.out_dir;
  std::filesystem::create_directories(out_dir);
  eval::write_loss_csv(ckpt.curve, out_dir / kLossCsvName);
  save_checkpoint(ckpt, out_dir / kCheckpointName);
  return ckpt;
}

EvalReport evaluate_representation(const models::Model& model, models::RepresentationKind kind,
                                   const DataSplits& data) {
  const auto train = models::extract_representation(model, data.train.X, kind);
  const auto test = models::extract_representation(model, data.test.X, kind);
  const auto centroids = eval::fit_centroids(train.vectors, data.train.labels);
  EvalReport report;
  report.kind = kind;
  report.width = train.vectors.cols();
  report.train_accuracy = eval::accuracy(eval::classify(centroids, train.vectors), data.train.labels);
  report.test_accuracy = eval::accuracy(eval::classify(centroids, test.vectors), data.test.labels);
  report.train_size = data.train.size();
  report.test_size = data.test.size();
  return report;
}

EvalReport cmd_eval(const Checkpoint& checkpoint, models::RepresentationKind kind,
                    const DataSplits& data,
                    const std::optional<std::filesystem::path>& report_path) {
  const EvalReport report = evaluate_representation(checkpoint.model, kind, data);
  if (report_path) {
    const nlohmann::json out{
        {"variant", std::string(models::to_string(checkpoint.model.variant()))},
        {"epoch", checkpoint.epoch},
        {"representation", std::string(models::to_string(kind))},
        {"width", report.width},
        {"train_size", report.train_size},
        {"test_size", report.test_size},
        {"train_accuracy", report.train_accuracy},
        {"test_accuracy", report.test_accuracy},
    };
    std::ofstream file(*report_path, std::ios::trunc);
    if (!file) throw Error(ErrorCode::IoError, "cannot write " + report_path->string());
    file << out.dump(2) << "\n";
  }
  return report;
}

GenerateResult cmd_generate(const Checkpoint& checkpoint, int count, std::uint64_t seed,
                            const std::filesystem::path& out_path) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "generate: count must be >= 1");
  const auto& model = checkpoint.model;
  const int side = image_side(model.input_dim());

  Rng rng(seed);
  nn::DenseMatrix z(count, model.latent());
  for (nn::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();

  GenerateResult result;
  result.images = models::decode(model, z);
  result.cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  result.rows = (count + result.cols - 1) / result.cols;

  nn::DenseMatrix tiles = nn::DenseMatrix::Zero(static_cast<nn::Index>(result.rows) * result.cols,
                                                model.input_dim());
  tiles.topRows(count) = result.images;
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  eval::write_sample_grid(tiles, result.rows, result.cols, out_path, side);
  return result;
}

std::vector<VariantGradCheck> run_gradcheck(std::uint64_t seed, bool corrupt, double tolerance) {
  constexpr nn::Index kBatch = 5;
  const models::ModelShape shape{6, 4, 2};
  std::vector<VariantGradCheck> out;
  for (const auto variant : {models::Variant::lgae, models::Variant::lgae_kl, models::Variant::vae}) {
    Rng rng(seed);
    models::Model model(variant, shape, 0.5, rng, 0.5);
    nn::DenseMatrix x(kBatch, shape.input_dim);
    for (nn::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform();
    nn::DenseMatrix noise(kBatch, shape.latent);
    for (nn::Index i = 0; i < noise.size(); ++i) noise.data()[i] = rng.normal();

    models::backward(model, x, models::reconstruct(model, x, noise));
    auto blocks = model.parameter_blocks();
    if (corrupt) blocks.front().grad[0] = blocks.front().grad[0] * 1.1 + 1e-3;

    auto loss = [&] {
      return models::compute_loss(model, x, models::reconstruct(model, x, noise)).total;
    };
    out.push_back({variant, nn::gradient_check(loss, blocks, tolerance)});
  }
  return out;
}

}  // namespace lgae::cli

#pragma once

// Implementations behind the `lgae` subcommands, kept in the library so
// tests can drive them without spawning processes.

#include "lgae/checkpoint.hpp"
#include "lgae/config.hpp"
#include "lgae/data.hpp"
#include "lgae/models.hpp"
#include "lgae/nn.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace lgae::cli {

inline constexpr const char* kLossCsvName = "loss.csv";
inline constexpr const char* kCheckpointName = "checkpoint.json";

struct DataSplits {
  data::Dataset train;
  data::Dataset test;
};

/// MNIST from config.data_dir or the synthetic blobs, truncated to the
/// configured limits.
DataSplits load_data(const TrainConfig& config);

/// Freshly initialised model, optimizer and RNG at epoch 0.
Checkpoint initial_checkpoint(const TrainConfig& config, std::size_t input_dim);

/// Trains from checkpoint.epoch up to target_epoch, evaluating the test loss
/// after every epoch. log may be null.
void train_until(Checkpoint& checkpoint, const DataSplits& data, int target_epoch,
                 std::ostream* log);

/// Runs (or resumes) training to config.epochs and writes loss.csv and
/// checkpoint.json into config.out_dir.
Checkpoint cmd_train(const TrainConfig& config, std::ostream* log,
                     const std::optional<std::filesystem::path>& resume = std::nullopt);

struct EvalReport {
  models::RepresentationKind kind = models::RepresentationKind::mu;
  nn::Index width = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

/// Fits nearest centroids on training representations, scores both splits.
EvalReport evaluate_representation(const models::Model& model, models::RepresentationKind kind,
                                   const DataSplits& data);

/// As evaluate_representation, also writing a JSON report when report_path
/// is given.
EvalReport cmd_eval(const Checkpoint& checkpoint, models::RepresentationKind kind,
                    const DataSplits& data,
                    const std::optional<std::filesystem::path>& report_path = std::nullopt);

struct GenerateResult {
  int rows = 0;
  int cols = 0;
  nn::DenseMatrix images;  // count x D, before quantisation
};

/// Decodes count draws z ~ N(0, I) and writes them as a PGM grid.
GenerateResult cmd_generate(const Checkpoint& checkpoint, int count, std::uint64_t seed,
                            const std::filesystem::path& out_path);

struct VariantGradCheck {
  models::Variant variant;
  nn::GradCheckReport report;
};

/// Finite-difference check of every parameter of a 6-4-2 / 2-4-6 model per
/// variant with frozen noise. corrupt perturbs one analytic gradient entry.
std::vector<VariantGradCheck> run_gradcheck(std::uint64_t seed, bool corrupt,
                                            double tolerance = 1e-4);

}  // namespace lgae::cli

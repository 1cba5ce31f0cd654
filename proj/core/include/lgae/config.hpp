#pragma once

#include "lgae/models.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace lgae::cli {

/// Run configuration. Defaults are the MNIST settings: 500 hidden units,
/// Adagrad at 0.01, minibatches of 100, lambda = 0.5.
struct TrainConfig {
  models::Variant variant = models::Variant::lgae;
  int k = 10;
  int hidden = 500;
  double lambda = 0.5;
  double lr = 0.01;
  std::size_t batch_size = 100;
  int epochs = 30;
  std::uint64_t seed = 1;
  int samples_per_input = 1;

  std::string dataset = "mnist";  // "mnist" or "blobs"
  std::string data_dir = "data/mnist";
  std::string out_dir = "out";
  std::size_t train_limit = 0;  // 0 keeps every example
  std::size_t test_limit = 0;

  std::size_t blobs_train = 512;
  std::size_t blobs_test = 128;
  std::size_t blobs_dim = 16;
  int blobs_classes = 4;
  std::uint64_t blobs_seed = 0;

  /// Throws InvalidArgument on an out-of-range field.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Flat JSON object; keys mirror the field names. Unknown keys are rejected.
std::string config_to_json(const TrainConfig& config);
TrainConfig config_from_json(std::string_view text);
TrainConfig load_config(const std::filesystem::path& path);

}  // namespace lgae::cli

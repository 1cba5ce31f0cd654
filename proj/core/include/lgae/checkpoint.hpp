#pragma once

#include "lgae/config.hpp"
#include "lgae/eval.hpp"
#include "lgae/models.hpp"
#include "lgae/nn.hpp"

#include <filesystem>
#include <string>

namespace lgae::cli {

inline constexpr int kCheckpointFormatVersion = 1;

/// Everything needed to continue a run bit-for-bit: parameters, Adagrad
/// accumulators, the training RNG state, and the loss curve so far.
struct Checkpoint {
  TrainConfig config;
  int epoch = 0;
  std::string rng_state;
  models::Model model;
  nn::AdagradState optimizer;
  eval::LossCurve curve;
};

/// JSON text with shortest round-trip decimals; save -> load -> save is
/// byte-identical.
std::string checkpoint_to_string(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lgae::cli

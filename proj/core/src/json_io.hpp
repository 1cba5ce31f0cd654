#pragma once

// Shared nlohmann::json conversions for the config and checkpoint formats.

#include "lgae/config.hpp"

#include <json.hpp>

namespace lgae::cli::detail {

nlohmann::json config_to_object(const TrainConfig& config);
TrainConfig config_from_object(const nlohmann::json& object);

}  // namespace lgae::cli::detail

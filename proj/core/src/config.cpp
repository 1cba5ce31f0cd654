#include "lgae/config.hpp"

#include "json_io.hpp"
#include "lgae/error.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lgae::cli {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, "config: " + message);
}

}  // namespace

void TrainConfig::validate() const {
  require(k >= 1, "k must be >= 1");
  require(hidden >= 1, "hidden must be >= 1");
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be >= 0");
  require(std::isfinite(lr) && lr > 0.0, "lr must be > 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(epochs >= 0, "epochs must be >= 0");
  require(samples_per_input >= 1, "samples_per_input must be >= 1");
  require(dataset == "mnist" || dataset == "blobs", "dataset must be 'mnist' or 'blobs'");
  require(blobs_train >= 1 && blobs_test >= 1 && blobs_dim >= 1 && blobs_classes >= 1,
          "blobs sizes must be positive");
}

namespace detail {

nlohmann::json config_to_object(const TrainConfig& c) {
  return nlohmann::json{
      {"variant", std::string(models::to_string(c.variant))},
      {"k", c.k},
      {"hidden", c.hidden},
      {"lambda", c.lambda},
      {"lr", c.lr},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"seed", c.seed},
      {"samples_per_input", c.samples_per_input},
      {"dataset", c.dataset},
      {"data_dir", c.data_dir},
      {"out_dir", c.out_dir},
      {"train_limit", c.train_limit},
      {"test_limit", c.test_limit},
      {"blobs_train", c.blobs_train},
      {"blobs_test", c.blobs_test},
      {"blobs_dim", c.blobs_dim},
      {"blobs_classes", c.blobs_classes},
      {"blobs_seed", c.blobs_seed},
  };
}

TrainConfig config_from_object(const nlohmann::json& object) {
  if (!object.is_object()) throw Error(ErrorCode::InvalidArgument, "config: expected an object");
  static const std::set<std::string> known{
      "variant",     "k",          "hidden",      "lambda",      "lr",
      "batch_size",  "epochs",     "seed",        "samples_per_input", "dataset",
      "data_dir",    "out_dir",    "train_limit", "test_limit",  "blobs_train",
      "blobs_test",  "blobs_dim",  "blobs_classes", "blobs_seed"};
  for (const auto& [key, value] : object.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::InvalidArgument, "config: unknown key '" + key + "'");
  }
  TrainConfig c;
  try {
    if (object.contains("variant")) c.variant = models::variant_from_string(object.at("variant").get<std::string>());
    auto get = [&](const char* key, auto& field) {
      if (object.contains(key)) object.at(key).get_to(field);
    };
    get("k", c.k);
    get("hidden", c.hidden);
    get("lambda", c.lambda);
    get("lr", c.lr);
    get("batch_size", c.batch_size);
    get("epochs", c.epochs);
    get("seed", c.seed);
    get("samples_per_input", c.samples_per_input);
    get("dataset", c.dataset);
    get("data_dir", c.data_dir);
    get("out_dir", c.out_dir);
    get("train_limit", c.train_limit);
    get("test_limit", c.test_limit);
    get("blobs_train", c.blobs_train);
    get("blobs_test", c.blobs_test);
    get("blobs_dim", c.blobs_dim);
    get("blobs_classes", c.blobs_classes);
    get("blobs_seed", c.blobs_seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace detail

std::string config_to_json(const TrainConfig& config) {
  return detail::config_to_object(config).dump(2) + "\n";
}

TrainConfig config_from_json(std::string_view text) {
  nlohmann::json object;
  try {
    object = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
  return detail::config_from_object(object);
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

}  // namespace lgae::cli

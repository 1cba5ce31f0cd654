#include "lgae/checkpoint.hpp"

#include "json_io.hpp"
#include "lgae/error.hpp"

#include <fstream>
#include <sstream>

namespace lgae::cli {

namespace {

using nlohmann::json;

json layers_to_json(const nn::Mlp& layers) {
  json out = json::array();
  for (const auto& layer : layers) {
    out.push_back({
        {"in", layer.in_dim()},
        {"out", layer.out_dim()},
        {"activation", std::string(nn::to_string(layer.activation))},
        {"W", std::vector<double>(layer.W.data(), layer.W.data() + layer.W.size())},
        {"b", std::vector<double>(layer.b.data(), layer.b.data() + layer.b.size())},
    });
  }
  return out;
}

nn::Mlp layers_from_json(const json& array) {
  nn::Mlp layers;
  for (const auto& item : array) {
    const auto in = item.at("in").get<nn::Index>();
    const auto out = item.at("out").get<nn::Index>();
    nn::LinearLayer layer(in, out, nn::activation_from_string(item.at("activation").get<std::string>()));
    const auto w = item.at("W").get<std::vector<double>>();
    const auto b = item.at("b").get<std::vector<double>>();
    if (static_cast<nn::Index>(w.size()) != in * out || static_cast<nn::Index>(b.size()) != out) {
      throw Error(ErrorCode::DimensionMismatch, "checkpoint: layer parameter count");
    }
    std::copy(w.begin(), w.end(), layer.W.data());
    std::copy(b.begin(), b.end(), layer.b.data());
    layers.push_back(std::move(layer));
  }
  return layers;
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  json curve = json::array();
  for (const auto& r : ckpt.curve) {
    curve.push_back(json::array({r.epoch, r.train_total, r.train_rec, r.train_reg, r.test_total}));
  }
  const json root{
      {"format_version", kCheckpointFormatVersion},
      {"config", detail::config_to_object(ckpt.config)},
      {"epoch", ckpt.epoch},
      {"rng_state", ckpt.rng_state},
      {"model",
       {{"variant", std::string(models::to_string(ckpt.model.variant()))},
        {"lambda", ckpt.model.lambda()},
        {"encoder", layers_to_json(ckpt.model.encoder())},
        {"decoder", layers_to_json(ckpt.model.decoder())}}},
      {"adagrad", {{"lr", ckpt.optimizer.lr}, {"eps", ckpt.optimizer.eps}, {"acc", ckpt.optimizer.acc}}},
      {"curve", curve},
  };
  return root.dump() + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  try {
    const json root = json::parse(text);
    const int version = root.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw Error(ErrorCode::InvalidArgument,
                  "checkpoint: unsupported format_version " + std::to_string(version));
    }
    const auto& m = root.at("model");
    models::Model model(models::variant_from_string(m.at("variant").get<std::string>()),
                        m.at("lambda").get<double>(), layers_from_json(m.at("encoder")),
                        layers_from_json(m.at("decoder")));
    const auto& opt = root.at("adagrad");
    nn::AdagradState optimizer(opt.at("lr").get<double>(), opt.at("eps").get<double>());
    optimizer.acc = opt.at("acc").get<std::vector<std::vector<double>>>();

    eval::LossCurve curve;
    for (const auto& row : root.at("curve")) {
      curve.push_back({row.at(0).get<int>(), row.at(1).get<double>(), row.at(2).get<double>(),
                       row.at(3).get<double>(), row.at(4).get<double>()});
    }
    return Checkpoint{detail::config_from_object(root.at("config")), root.at("epoch").get<int>(),
                      root.at("rng_state").get<std::string>(), std::move(model),
                      std::move(optimizer), std::move(curve)};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << checkpoint_to_string(checkpoint);
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace lgae::cli

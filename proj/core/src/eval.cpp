#include "lgae/eval.hpp"

#include "lgae/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace lgae::eval {

CentroidModel fit_centroids(const DenseMatrix& reps, std::span<const int> labels, int num_classes) {
  if (static_cast<std::size_t>(reps.rows()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "fit_centroids: one label per representation");
  }
  std::map<int, std::pair<nn::Vector, std::size_t>> sums;
  if (num_classes > 0) {
    for (int c = 0; c < num_classes; ++c) sums[c] = {nn::Vector::Zero(reps.cols()), 0};
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 0 || (num_classes > 0 && label >= num_classes)) {
      throw Error(ErrorCode::InvalidArgument, "fit_centroids: label out of range");
    }
    auto [it, inserted] = sums.try_emplace(label, nn::Vector::Zero(reps.cols()), 0);
    it->second.first += reps.row(static_cast<Eigen::Index>(i)).transpose();
    ++it->second.second;
  }
  if (sums.empty()) throw Error(ErrorCode::EmptyClass, "fit_centroids: no examples");

  CentroidModel model;
  model.centroids.resize(static_cast<Eigen::Index>(sums.size()), reps.cols());
  Eigen::Index row = 0;
  for (const auto& [label, acc] : sums) {
    if (acc.second == 0) {
      throw Error(ErrorCode::EmptyClass, "fit_centroids: class " + std::to_string(label) +
                                             " has no examples");
    }
    model.class_ids.push_back(label);
    model.centroids.row(row++) = (acc.first / static_cast<double>(acc.second)).transpose();
  }
  return model;
}

std::vector<int> classify(const CentroidModel& model, const DenseMatrix& reps) {
  if (reps.cols() != model.centroids.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "classify: representation width mismatch");
  }
  std::vector<int> out(static_cast<std::size_t>(reps.rows()));
  for (Eigen::Index i = 0; i < reps.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_id = std::numeric_limits<int>::max();
    for (Eigen::Index c = 0; c < model.centroids.rows(); ++c) {
      const double d = (reps.row(i) - model.centroids.row(c)).squaredNorm();
      const int id = model.class_ids[static_cast<std::size_t>(c)];
      if (d < best || (d == best && id < best_id)) {
        best = d;
        best_id = id;
      }
    }
    out[static_cast<std::size_t>(i)] = best_id;
  }
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::DimensionMismatch, "accuracy: length mismatch");
  }
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, "malformed number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string loss_csv(const LossCurve& curve) {
  std::string out = std::string(kLossCsvHeader) + "\n";
  for (const auto& r : curve) {
    out += std::to_string(r.epoch) + ',' + format_double(r.train_total) + ',' +
           format_double(r.train_rec) + ',' + format_double(r.train_reg) + ',' +
           format_double(r.test_total) + '\n';
  }
  return out;
}

LossCurve parse_loss_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kLossCsvHeader) {
    throw Error(ErrorCode::InvalidArgument, "loss CSV: missing header");
  }
  LossCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (auto pos = rest.find(','); pos != std::string_view::npos; pos = rest.find(',')) {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 5) throw Error(ErrorCode::InvalidArgument, "loss CSV: need 5 fields");
    LossRow row;
    row.epoch = static_cast<int>(parse_double(fields[0]));
    row.train_total = parse_double(fields[1]);
    row.train_rec = parse_double(fields[2]);
    row.train_reg = parse_double(fields[3]);
    row.test_total = parse_double(fields[4]);
    if (!curve.empty() && row.epoch <= curve.back().epoch) {
      throw Error(ErrorCode::InvalidArgument, "loss CSV: epochs must increase");
    }
    curve.push_back(row);
  }
  return curve;
}

void write_loss_csv(const LossCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << loss_csv(curve);
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

LossCurve read_loss_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_loss_csv(ss.str());
}

// ---------------------------------------------------------------------------
// PGM

std::vector<unsigned char> sample_grid_pgm(const DenseMatrix& images, int rows, int cols, int side) {
  if (rows < 1 || cols < 1 || side < 1) {
    throw Error(ErrorCode::InvalidArgument, "sample grid: rows, cols and side must be positive");
  }
  if (images.cols() != static_cast<Eigen::Index>(side) * side) {
    throw Error(ErrorCode::DimensionMismatch, "sample grid: images must be side x side");
  }
  if (images.rows() < static_cast<Eigen::Index>(rows) * cols) {
    throw Error(ErrorCode::DimensionMismatch, "sample grid: rows * cols exceeds batch");
  }
  const int width = cols * side;
  const int height = rows * side;
  const std::string header =
      "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  out.reserve(header.size() + static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Eigen::Index tile = static_cast<Eigen::Index>(y / side) * cols + x / side;
      const Eigen::Index pixel = static_cast<Eigen::Index>(y % side) * side + x % side;
      const double v = std::clamp(images(tile, pixel), 0.0, 1.0);
      out.push_back(static_cast<unsigned char>(std::floor(v * 255.0 + 0.5)));
    }
  }
  return out;
}

void write_sample_grid(const DenseMatrix& images, int rows, int cols,
                       const std::filesystem::path& path, int side) {
  const auto bytes = sample_grid_pgm(images, rows, cols, side);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace lgae::eval

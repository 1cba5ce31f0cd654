#pragma once

#include "lgae/nn.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lgae::eval {

using nn::DenseMatrix;

struct CentroidModel {
  std::vector<int> class_ids;  // class of each centroid row
  DenseMatrix centroids;       // num_classes x width
};

/// Per-class mean of the representation rows. With num_classes > 0 every
/// class in [0, num_classes) must be present (EmptyClass otherwise); with 0
/// the classes are those appearing in labels.
CentroidModel fit_centroids(const DenseMatrix& reps, std::span<const int> labels,
                            int num_classes = 0);

/// Nearest centroid by Euclidean distance; ties go to the lowest class id.
std::vector<int> classify(const CentroidModel& model, const DenseMatrix& reps);

/// Percentage of matching entries, in [0, 100].
double accuracy(std::span<const int> predicted, std::span<const int> truth);

struct LossRow {
  int epoch = 0;
  double train_total = 0.0;
  double train_rec = 0.0;
  double train_reg = 0.0;
  double test_total = 0.0;

  friend bool operator==(const LossRow&, const LossRow&) = default;
};

using LossCurve = std::vector<LossRow>;

inline constexpr const char* kLossCsvHeader = "epoch,train_total,train_rec,train_reg,test_total";

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

std::string loss_csv(const LossCurve& curve);
LossCurve parse_loss_csv(const std::string& text);
void write_loss_csv(const LossCurve& curve, const std::filesystem::path& path);
LossCurve read_loss_csv(const std::filesystem::path& path);

/// Tiles the first rows*cols images (each side x side, values in [0, 1])
/// row-major into a binary PGM (P5, maxval 255). Pixels are
/// floor(v * 255 + 0.5) after clamping to [0, 1].
std::vector<unsigned char> sample_grid_pgm(const DenseMatrix& images, int rows, int cols,
                                           int side = 28);
void write_sample_grid(const DenseMatrix& images, int rows, int cols,
                       const std::filesystem::path& path, int side = 28);

}  // namespace lgae::eval

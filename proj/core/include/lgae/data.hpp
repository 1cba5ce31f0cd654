#pragma once

#include "lgae/nn.hpp"
#include "lgae/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace lgae::data {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Raw images as stored in an IDX file, one row-major image after another.
struct ByteImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;

  [[nodiscard]] std::size_t dim() const noexcept { return rows * cols; }
};

ByteImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_idx_images(const ByteImages& images);
std::vector<std::uint8_t> serialize_idx_labels(std::span<const std::uint8_t> labels);

ByteImages load_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path);

void write_idx_images(const std::filesystem::path& path, const ByteImages& images);
void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels);

struct Dataset {
  nn::DenseMatrix X;        // n x D, entries in [0, 1]
  std::vector<int> labels;  // n entries in [0, num_classes)
  int num_classes = 0;

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(X.cols()); }

  /// First n examples (or all, when n is 0 or exceeds the size).
  [[nodiscard]] Dataset head(std::size_t n) const;
};

/// Scales bytes by 1/255 and attaches labels. Throws CountMismatch when the
/// label count differs from the image count.
Dataset normalize(const ByteImages& images, std::span<const std::uint8_t> labels,
                  int num_classes = 10);

enum class Split { train, test };

/// Reads {train,t10k}-{images-idx3,labels-idx1}-ubyte from dir.
Dataset load_mnist(const std::filesystem::path& dir, Split split);

/// Gaussian clusters clamped to [0, 1]. Class c is centred at 0.8 on the
/// dimensions d with d % num_classes == c and at 0.2 elsewhere.
Dataset synthetic_blobs(Rng& rng, std::size_t n, std::size_t dim, int num_classes,
                        double noise = 0.05);

}  // namespace lgae::data

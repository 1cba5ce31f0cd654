#include "lgae/data.hpp"

#include "lgae/error.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

namespace lgae::data {

namespace {

constexpr std::size_t kImagesHeader = 16;
constexpr std::size_t kLabelsHeader = 8;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace

ByteImages parse_idx_images(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::TruncatedFile, "IDX images: missing magic");
  if (read_be32(bytes, 0) != kIdxImagesMagic) {
    throw Error(ErrorCode::BadMagic, "IDX images: expected magic 0x00000803");
  }
  if (bytes.size() < kImagesHeader) throw Error(ErrorCode::TruncatedFile, "IDX images: header");
  ByteImages images;
  images.count = read_be32(bytes, 4);
  images.rows = read_be32(bytes, 8);
  images.cols = read_be32(bytes, 12);
  const std::size_t payload = images.count * images.rows * images.cols;
  if (bytes.size() - kImagesHeader < payload) {
    throw Error(ErrorCode::TruncatedFile, "IDX images: " + std::to_string(payload) +
                                              " pixel bytes declared, " +
                                              std::to_string(bytes.size() - kImagesHeader) +
                                              " present");
  }
  if (bytes.size() - kImagesHeader > payload) {
    throw Error(ErrorCode::DimensionMismatch, "IDX images: trailing bytes after payload");
  }
  images.pixels.assign(bytes.begin() + kImagesHeader, bytes.end());
  return images;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::TruncatedFile, "IDX labels: missing magic");
  if (read_be32(bytes, 0) != kIdxLabelsMagic) {
    throw Error(ErrorCode::BadMagic, "IDX labels: expected magic 0x00000801");
  }
  if (bytes.size() < kLabelsHeader) throw Error(ErrorCode::TruncatedFile, "IDX labels: header");
  const std::size_t count = read_be32(bytes, 4);
  if (bytes.size() - kLabelsHeader < count) {
    throw Error(ErrorCode::TruncatedFile, "IDX labels: " + std::to_string(count) +
                                              " labels declared, " +
                                              std::to_string(bytes.size() - kLabelsHeader) +
                                              " present");
  }
  if (bytes.size() - kLabelsHeader > count) {
    throw Error(ErrorCode::DimensionMismatch, "IDX labels: trailing bytes after payload");
  }
  return {bytes.begin() + kLabelsHeader, bytes.end()};
}

std::vector<std::uint8_t> serialize_idx_images(const ByteImages& images) {
  if (images.pixels.size() != images.count * images.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "serialize_idx_images: pixel count");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kImagesHeader + images.pixels.size());
  write_be32(out, kIdxImagesMagic);
  write_be32(out, static_cast<std::uint32_t>(images.count));
  write_be32(out, static_cast<std::uint32_t>(images.rows));
  write_be32(out, static_cast<std::uint32_t>(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> serialize_idx_labels(std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(kLabelsHeader + labels.size());
  write_be32(out, kIdxLabelsMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

ByteImages load_idx_images(const std::filesystem::path& path) {
  return parse_idx_images(read_file(path));
}

std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path) {
  return parse_idx_labels(read_file(path));
}

void write_idx_images(const std::filesystem::path& path, const ByteImages& images) {
  write_file(path, serialize_idx_images(images));
}

void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels) {
  write_file(path, serialize_idx_labels(labels));
}

Dataset Dataset::head(std::size_t n) const {
  if (n == 0 || n >= size()) return *this;
  Dataset out;
  out.X = X.topRows(static_cast<Eigen::Index>(n));
  out.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n));
  out.num_classes = num_classes;
  return out;
}

Dataset normalize(const ByteImages& images, std::span<const std::uint8_t> labels,
                  int num_classes) {
  if (labels.size() != images.count) {
    throw Error(ErrorCode::CountMismatch, std::to_string(images.count) + " images but " +
                                              std::to_string(labels.size()) + " labels");
  }
  Dataset out;
  out.num_classes = num_classes;
  out.X.resize(static_cast<Eigen::Index>(images.count), static_cast<Eigen::Index>(images.dim()));
  for (std::size_t i = 0; i < images.pixels.size(); ++i) {
    out.X.data()[i] = images.pixels[i] / 255.0;
  }
  out.labels.reserve(labels.size());
  for (const auto label : labels) {
    if (label >= num_classes) {
      throw Error(ErrorCode::InvalidArgument,
                  "label " + std::to_string(label) + " outside [0, " +
                      std::to_string(num_classes) + ")");
    }
    out.labels.push_back(label);
  }
  return out;
}

Dataset load_mnist(const std::filesystem::path& dir, Split split) {
  const std::string prefix = split == Split::train ? "train" : "t10k";
  const auto images = load_idx_images(dir / (prefix + "-images-idx3-ubyte"));
  if (images.rows != 28 || images.cols != 28) {
    throw Error(ErrorCode::DimensionMismatch, "MNIST images must be 28x28");
  }
  const auto labels = load_idx_labels(dir / (prefix + "-labels-idx1-ubyte"));
  return normalize(images, labels, 10);
}

Dataset synthetic_blobs(Rng& rng, std::size_t n, std::size_t dim, int num_classes, double noise) {
  if (n == 0 || dim == 0 || num_classes <= 0) {
    throw Error(ErrorCode::InvalidArgument, "synthetic_blobs: sizes must be positive");
  }
  Dataset out;
  out.num_classes = num_classes;
  out.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(num_classes));
    out.labels[i] = label;
    for (std::size_t d = 0; d < dim; ++d) {
      const double centre = static_cast<int>(d % static_cast<std::size_t>(num_classes)) == label
                                ? 0.8
                                : 0.2;
      out.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
          std::clamp(centre + noise * rng.normal(), 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace lgae::data

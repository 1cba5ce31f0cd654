#include "lgae/rng.hpp"

#include "lgae/error.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lgae {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::InvalidArgument, "Rng::below: zero bound");
  // Largest multiple of bound representable in 64 bits; draws at or above it
  // are rejected so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t draw = engine_();
  while (draw > limit) draw = engine_();
  return draw % bound;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::string Rng::state() const {
  std::ostringstream os;
  os << engine_ << ' ' << (has_spare_ ? 1 : 0) << ' ' << std::bit_cast<std::uint64_t>(spare_);
  return os.str();
}

void Rng::set_state(const std::string& text) {
  std::istringstream is(text);
  std::mt19937_64 engine;
  int spare_flag = 0;
  std::uint64_t spare_bits = 0;
  is >> engine >> spare_flag >> spare_bits;
  if (!is) throw Error(ErrorCode::InvalidArgument, "Rng::set_state: malformed state");
  engine_ = engine;
  has_spare_ = spare_flag != 0;
  spare_ = std::bit_cast<double>(spare_bits);
}

bool operator==(const Rng& a, const Rng& b) {
  return a.engine_ == b.engine_ && a.has_spare_ == b.has_spare_ &&
         std::bit_cast<std::uint64_t>(a.spare_) == std::bit_cast<std::uint64_t>(b.spare_);
}

std::vector<double> gaussian_draws(Rng& rng, std::size_t count) {
  std::vector<double> out(count);
  for (auto& v : out) v = rng.normal();
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace lgae

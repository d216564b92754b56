#include "packetvision/imaging.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "packetvision/error.hpp"

namespace packetvision::imaging {

namespace {

void require_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument,
                "lambda must be finite and >= 0, got " + std::to_string(lambda));
  }
}

void require_valid(const ByteMatrix& m) {
  if (!m.is_valid()) {
    throw Error(ErrorCode::InvalidArgument, "malformed byte matrix");
  }
}

std::uint64_t poisson_knuth(double lambda, SplitMix64& rng) {
  const double limit = std::exp(-lambda);
  std::uint64_t k = 0;
  double prod = rng.next_double();
  while (prod > limit) {
    ++k;
    prod *= rng.next_double();
  }
  return k;
}

// W. Hormann, "The transformed rejection method for generating Poisson
// random variables", Insurance: Mathematics and Economics 12 (1993).
std::uint64_t poisson_ptrs(double lambda, SplitMix64& rng) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_double();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) {
      return static_cast<std::uint64_t>(k);
    }
    if (k < 0.0 || (us < 0.013 && v > us)) {
      continue;
    }
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = -lambda + k * loglam - std::lgamma(k + 1.0);
    if (lhs <= rhs) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

ByteMatrix to_matrix(std::span<const std::uint8_t> packet_bytes) {
  if (packet_bytes.empty()) {
    throw Error(ErrorCode::EmptyPacket, "packet has no bytes");
  }
  ByteMatrix m;
  m.rows = (packet_bytes.size() + kMatrixWidth - 1) / kMatrixWidth;
  m.pad_count = m.rows * kMatrixWidth - packet_bytes.size();
  m.data.reserve(m.rows * kMatrixWidth);
  m.data.assign(packet_bytes.begin(), packet_bytes.end());
  m.data.resize(m.rows * kMatrixWidth, kPadByte);
  return m;
}

std::uint64_t poisson_sample(double lambda, SplitMix64& rng) {
  require_lambda(lambda);
  if (lambda == 0.0) {
    return 0;
  }
  return lambda < 10.0 ? poisson_knuth(lambda, rng) : poisson_ptrs(lambda, rng);
}

ByteMatrix shuffle(ByteMatrix matrix, const ShuffleSpec& spec) {
  require_valid(matrix);
  require_lambda(spec.lambda);
  if (spec.lambda == 0.0) {
    return matrix;
  }
  SplitMix64 rng(spec.seed);
  const std::size_t n = matrix.data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t d = poisson_sample(spec.lambda, rng);
    const std::size_t j = (i + static_cast<std::size_t>(d % n)) % n;
    std::swap(matrix.data[i], matrix.data[j]);
  }
  return matrix;
}

PacketImage render(const ByteMatrix& matrix) {
  require_valid(matrix);
  PacketImage img;
  img.height = matrix.rows;
  img.pixels.reserve(matrix.data.size() * 3);
  for (const std::uint8_t v : matrix.data) {
    img.pixels.insert(img.pixels.end(), {v, v, v});
  }
  return img;
}

PacketImage packet_to_image(std::span<const std::uint8_t> packet_bytes,
                            const ShuffleSpec& spec) {
  return render(shuffle(to_matrix(packet_bytes), spec));
}

}  // namespace packetvision::imaging

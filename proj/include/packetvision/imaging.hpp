#pragma once

// Packet-to-image pipeline: bytes -> padded n x 8 matrix -> Poisson
// displacement shuffle -> grayscale RGB raster -> PNG.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "packetvision/random.hpp"

namespace packetvision::imaging {

inline constexpr std::size_t kMatrixWidth = 8;
inline constexpr std::uint8_t kPadByte = 0xFF;
inline constexpr double kDefaultLambda = 8.0;

/// Row-major n x 8 matrix of byte values. Row 0, column 0 holds the first
/// packet byte; the last pad_count cells of an unshuffled matrix are 0xFF.
struct ByteMatrix {
  std::size_t rows = 0;
  std::size_t pad_count = 0;
  std::vector<std::uint8_t> data;

  static constexpr std::size_t width = kMatrixWidth;

  std::uint8_t at(std::size_t row, std::size_t col) const {
    return data[row * width + col];
  }
  bool is_valid() const noexcept {
    return rows >= 1 && data.size() == rows * width && pad_count < width;
  }

  friend bool operator==(const ByteMatrix&, const ByteMatrix&) = default;
};

struct ShuffleSpec {
  double lambda = kDefaultLambda;
  std::uint64_t seed = 0;
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8 pixels wide, `height` rows, RGB interleaved row-major.
struct PacketImage {
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  static constexpr std::size_t width = kMatrixWidth;

  Rgb pixel(std::size_t row, std::size_t col) const {
    const std::size_t i = (row * width + col) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  bool is_valid() const noexcept {
    return height >= 1 && pixels.size() == height * width * 3;
  }

  friend bool operator==(const PacketImage&, const PacketImage&) = default;
};

/// Rows = ceil(len / 8); the tail is filled with 0xFF. Throws EmptyPacket.
ByteMatrix to_matrix(std::span<const std::uint8_t> packet_bytes);

/// Draws k ~ Poisson(lambda). Knuth's product-of-uniforms method below
/// lambda 10, Hormann's transformed rejection (PTRS) above. lambda == 0
/// returns 0 without touching the generator.
std::uint64_t poisson_sample(double lambda, SplitMix64& rng);

/// For i = 0..L-1 swaps cell i with cell (i + d_i) mod L, d_i drawn from
/// Poisson(spec.lambda) by a generator seeded with spec.seed.
ByteMatrix shuffle(ByteMatrix matrix, const ShuffleSpec& spec);

PacketImage render(const ByteMatrix& matrix);

/// render(shuffle(to_matrix(bytes), spec))
PacketImage packet_to_image(std::span<const std::uint8_t> packet_bytes,
                            const ShuffleSpec& spec);

/// 8-bit RGB truecolor, non-interlaced, no ancillary chunks. The output is
/// a pure function of the image.
std::vector<std::uint8_t> encode_png(const PacketImage& image);
void encode_png(const PacketImage& image, const std::filesystem::path& path);

}  // namespace packetvision::imaging

#include <zlib.h>

#include <array>
#include <string>

#include "packetvision/error.hpp"
#include "packetvision/imaging.hpp"
#include "packetvision/io.hpp"

namespace packetvision::imaging {

namespace {

constexpr std::array<std::uint8_t, 8> kSignature = {0x89, 'P',  'N',  'G',
                                                    '\r', '\n', 0x1A, '\n'};

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char (&type)[5],
               std::span<const std::uint8_t> payload) {
  put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  // CRC covers type and data, not the length field.
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + type_at,
              static_cast<uInt>(out.size() - type_at));
  put_u32_be(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> deflate_scanlines(const PacketImage& image) {
  constexpr std::size_t stride = PacketImage::width * 3;
  std::vector<std::uint8_t> raw;
  raw.reserve(image.height * (stride + 1));
  for (std::size_t row = 0; row < image.height; ++row) {
    raw.push_back(0);  // filter type None
    const auto* line = image.pixels.data() + row * stride;
    raw.insert(raw.end(), line, line + stride);
  }
  uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(packed_len);
  const int rc = compress2(packed.data(), &packed_len, raw.data(),
                           static_cast<uLong>(raw.size()), Z_BEST_COMPRESSION);
  if (rc != Z_OK) {
    throw Error(ErrorCode::IoError, "zlib compress2 failed: " + std::to_string(rc));
  }
  packed.resize(packed_len);
  return packed;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const PacketImage& image) {
  if (!image.is_valid()) {
    throw Error(ErrorCode::InvalidArgument, "malformed packet image");
  }
  std::vector<std::uint8_t> out(kSignature.begin(), kSignature.end());

  std::vector<std::uint8_t> ihdr;
  put_u32_be(ihdr, static_cast<std::uint32_t>(PacketImage::width));
  put_u32_be(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // color type: truecolor
  ihdr.push_back(0);  // compression: deflate
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // interlace: none
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", deflate_scanlines(image));
  put_chunk(out, "IEND", {});
  return out;
}

void encode_png(const PacketImage& image, const std::filesystem::path& path) {
  io::write_file(path, encode_png(image));
}

}  // namespace packetvision::imaging

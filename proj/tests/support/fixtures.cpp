#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <random>
#include <stdexcept>

#include <unistd.h>

namespace pvtest {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<packetvision::pcap::RawPacket> random_packets(std::uint64_t seed, std::size_t count,
                                                          std::size_t min_len,
                                                          std::size_t max_len, std::uint8_t lo,
                                                          std::uint8_t hi) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
  std::uniform_int_distribution<int> byte_dist(lo, hi);
  std::uniform_int_distribution<std::uint32_t> ts_dist(0, 2000000000);
  std::uniform_int_distribution<std::uint32_t> us_dist(0, 999999);
  std::vector<packetvision::pcap::RawPacket> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::uint8_t> data(len_dist(gen));
    for (auto& b : data) b = static_cast<std::uint8_t>(byte_dist(gen));
    auto p = packetvision::pcap::make_packet(std::move(data), ts_dist(gen), us_dist(gen));
    p.original_len += static_cast<std::uint32_t>(gen() % 3 == 0 ? gen() % 100 : 0);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

struct Writer {
  bool big;
  std::vector<std::uint8_t> out;
  void u32(std::uint32_t v) {
    const std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                               static_cast<std::uint8_t>(v >> 16),
                               static_cast<std::uint8_t>(v >> 24)};
    if (big) {
      out.insert(out.end(), {b[3], b[2], b[1], b[0]});
    } else {
      out.insert(out.end(), std::begin(b), std::end(b));
    }
  }
  void u16(std::uint16_t v) {
    const std::uint8_t lo = static_cast<std::uint8_t>(v), hi = static_cast<std::uint8_t>(v >> 8);
    if (big) {
      out.insert(out.end(), {hi, lo});
    } else {
      out.insert(out.end(), {lo, hi});
    }
  }
};

}  // namespace

std::vector<std::uint8_t> hand_pcap(bool big_endian, std::uint32_t magic,
                                    const std::vector<RecordSpec>& records,
                                    std::uint32_t snaplen, std::uint32_t link_type,
                                    std::uint16_t major, std::uint16_t minor) {
  Writer w{big_endian, {}};
  w.u32(magic);
  w.u16(major);
  w.u16(minor);
  w.u32(0);
  w.u32(0);
  w.u32(snaplen);
  w.u32(link_type);
  for (const auto& r : records) {
    w.u32(r.ts_sec);
    w.u32(r.ts_frac);
    w.u32(r.incl_len);
    w.u32(r.orig_len);
    w.out.insert(w.out.end(), r.body.begin(), r.body.end());
  }
  return w.out;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<std::uint8_t> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::pair<std::string, std::vector<std::uint8_t>>> snapshot_tree(
    const fs::path& root) {
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      files.emplace_back(fs::relative(e.path(), root).generic_string(), slurp(e.path()));
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace pvtest

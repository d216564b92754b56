#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "packetvision/pcap.hpp"

namespace pvtest {

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "pv");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Packets with lengths uniform in [min_len, max_len] and byte values in
/// [lo, hi], drawn from std::mt19937_64.
std::vector<packetvision::pcap::RawPacket> random_packets(std::uint64_t seed,
                                                          std::size_t count,
                                                          std::size_t min_len,
                                                          std::size_t max_len,
                                                          std::uint8_t lo = 0,
                                                          std::uint8_t hi = 255);

/// Hand-assembled capture bytes for format tests, independent of the
/// library writer.
struct RecordSpec {
  std::uint32_t ts_sec = 0;
  std::uint32_t ts_frac = 0;
  std::uint32_t incl_len = 0;
  std::uint32_t orig_len = 0;
  std::vector<std::uint8_t> body;  // written as-is, may differ from incl_len
};
std::vector<std::uint8_t> hand_pcap(bool big_endian, std::uint32_t magic,
                                    const std::vector<RecordSpec>& records,
                                    std::uint32_t snaplen = 65535,
                                    std::uint32_t link_type = 1,
                                    std::uint16_t major = 2, std::uint16_t minor = 4);

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> slurp(const std::filesystem::path& path);

/// Relative path -> file bytes for every regular file under `root`.
std::vector<std::pair<std::string, std::vector<std::uint8_t>>> snapshot_tree(
    const std::filesystem::path& root);

}  // namespace pvtest

#pragma once

/**
 * Classic pcap (libpcap 2.4) reading and writing.
 *
 * File layout:
 *   global header, 24 bytes: magic, version_major, version_minor, thiszone,
 *                            sigfigs, snaplen, network
 *   per record,    16 bytes: ts_sec, ts_usec, incl_len, orig_len
 *                            followed by incl_len data bytes
 *
 * Byte order is inferred from the magic. Both the microsecond (0xA1B2C3D4)
 * and nanosecond (0xA1B23C4D) variants are read; nanosecond timestamps are
 * normalized to microseconds. pcapng is rejected with BadMagic.
 */

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "packetvision/error.hpp"

namespace packetvision::pcap {

inline constexpr std::uint32_t kMagicMicros = 0xA1B2C3D4;
inline constexpr std::uint32_t kMagicNanos = 0xA1B23C4D;
inline constexpr std::uint32_t kMagicPcapng = 0x0A0D0D0A;
inline constexpr std::size_t kGlobalHeaderSize = 24;
inline constexpr std::size_t kRecordHeaderSize = 16;
/// Records larger than this (and larger than snaplen) are treated as corrupt.
inline constexpr std::uint32_t kMaxRecordSize = 262144;
inline constexpr std::uint32_t kLinkTypeEthernet = 1;

enum class ByteOrder { little, big };

struct RawPacket {
  std::vector<std::uint8_t> data;
  std::uint32_t captured_len = 0;
  std::uint32_t original_len = 0;
  std::uint32_t timestamp_s = 0;
  std::uint32_t timestamp_us = 0;
  std::uint32_t link_type = kLinkTypeEthernet;

  friend bool operator==(const RawPacket&, const RawPacket&) = default;
};

/// Builds a packet whose lengths match `data` exactly.
RawPacket make_packet(std::vector<std::uint8_t> data,
                      std::uint32_t timestamp_s = 0,
                      std::uint32_t timestamp_us = 0);

struct PcapFileInfo {
  ByteOrder byte_order = ByteOrder::little;
  bool nanosecond_timestamps = false;
  std::uint16_t version_major = 2;
  std::uint16_t version_minor = 4;
  std::uint32_t snaplen = 0;
  std::uint32_t link_type = 0;
  std::uint64_t packet_count = 0;
};

struct ReadResult {
  PcapFileInfo info;
  std::vector<RawPacket> packets;
  std::uint64_t skipped_empty = 0;
  /// Set when reading stopped early; `packets` holds everything read
  /// before the fault.
  std::optional<Error> error;
};

/// Parses the global header and counts records with a full scan.
/// packet_count counts every record header found, empty ones included.
PcapFileInfo open_pcap(const std::filesystem::path& path);

/// Parses an in-memory capture. Throws for header faults; record faults
/// are returned in ReadResult::error.
ReadResult parse_pcap(std::span<const std::uint8_t> bytes);

ReadResult read_packets(const std::filesystem::path& path);

/// Like read_packets but throws if the read stopped on a record fault.
std::vector<RawPacket> read_packets_strict(const std::filesystem::path& path);

/// Serializes a little-endian microsecond pcap v2.4 capture.
std::vector<std::uint8_t> serialize_pcap(std::span<const RawPacket> packets,
                                         std::uint32_t link_type,
                                         std::uint32_t snaplen = 65535);

void write_pcap(std::span<const RawPacket> packets, std::uint32_t link_type,
                const std::filesystem::path& path);

}  // namespace packetvision::pcap

#include "packetvision/pcap.hpp"

#include <algorithm>
#include <string>

#include "packetvision/io.hpp"

namespace packetvision::pcap {

namespace {

std::uint32_t load_u32(const std::uint8_t* p, ByteOrder order) {
  if (order == ByteOrder::little) {
    return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 |
           std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
  }
  return std::uint32_t{p[3]} | std::uint32_t{p[2]} << 8 |
         std::uint32_t{p[1]} << 16 | std::uint32_t{p[0]} << 24;
}

std::uint16_t load_u16(const std::uint8_t* p, ByteOrder order) {
  if (order == ByteOrder::little) {
    return static_cast<std::uint16_t>(p[0] | p[1] << 8);
  }
  return static_cast<std::uint16_t>(p[1] | p[0] << 8);
}

void store_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void store_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

PcapFileInfo parse_global_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kGlobalHeaderSize) {
    throw Error(ErrorCode::Truncated,
                "file has " + std::to_string(bytes.size()) +
                    " bytes, global header needs 24");
  }
  PcapFileInfo info;
  const std::uint32_t le_magic = load_u32(bytes.data(), ByteOrder::little);
  const std::uint32_t be_magic = load_u32(bytes.data(), ByteOrder::big);
  if (le_magic == kMagicMicros || le_magic == kMagicNanos) {
    info.byte_order = ByteOrder::little;
    info.nanosecond_timestamps = le_magic == kMagicNanos;
  } else if (be_magic == kMagicMicros || be_magic == kMagicNanos) {
    info.byte_order = ByteOrder::big;
    info.nanosecond_timestamps = be_magic == kMagicNanos;
  } else if (le_magic == kMagicPcapng) {
    throw Error(ErrorCode::BadMagic, "pcapng captures are not supported");
  } else {
    throw Error(ErrorCode::BadMagic, "not a classic pcap capture");
  }
  const auto order = info.byte_order;
  info.version_major = load_u16(bytes.data() + 4, order);
  info.version_minor = load_u16(bytes.data() + 6, order);
  if (info.version_major != 2 || info.version_minor != 4) {
    throw Error(ErrorCode::UnsupportedVersion,
                "pcap version " + std::to_string(info.version_major) + "." +
                    std::to_string(info.version_minor));
  }
  info.snaplen = load_u32(bytes.data() + 16, order);
  info.link_type = load_u32(bytes.data() + 20, order);
  return info;
}

std::string at_offset(std::size_t offset) {
  return " at offset " + std::to_string(offset);
}

}  // namespace

RawPacket make_packet(std::vector<std::uint8_t> data,
                      std::uint32_t timestamp_s, std::uint32_t timestamp_us) {
  RawPacket p;
  p.captured_len = static_cast<std::uint32_t>(data.size());
  p.original_len = p.captured_len;
  p.data = std::move(data);
  p.timestamp_s = timestamp_s;
  p.timestamp_us = timestamp_us;
  return p;
}

ReadResult parse_pcap(std::span<const std::uint8_t> bytes) {
  ReadResult result;
  result.info = parse_global_header(bytes);
  const auto order = result.info.byte_order;
  const std::uint32_t snaplen = result.info.snaplen;

  std::size_t offset = kGlobalHeaderSize;
  while (offset < bytes.size()) {
    if (bytes.size() - offset < kRecordHeaderSize) {
      result.error = Error(ErrorCode::TruncatedRecord,
                           "partial record header" + at_offset(offset));
      break;
    }
    const std::uint8_t* h = bytes.data() + offset;
    const std::uint32_t ts_sec = load_u32(h, order);
    std::uint32_t ts_frac = load_u32(h + 4, order);
    const std::uint32_t incl_len = load_u32(h + 8, order);
    const std::uint32_t orig_len = load_u32(h + 12, order);

    if (incl_len > snaplen && incl_len > kMaxRecordSize) {
      result.error = Error(ErrorCode::RecordTooLarge,
                           "incl_len " + std::to_string(incl_len) +
                               at_offset(offset));
      break;
    }
    const std::size_t body = offset + kRecordHeaderSize;
    if (bytes.size() - body < incl_len) {
      result.error = Error(ErrorCode::TruncatedRecord,
                           "record body of " + std::to_string(incl_len) +
                               " bytes runs past end of file" +
                               at_offset(offset));
      break;
    }
    ++result.info.packet_count;
    offset = body + incl_len;

    if (incl_len == 0) {
      ++result.skipped_empty;
      continue;
    }
    if (result.info.nanosecond_timestamps) {
      ts_frac /= 1000;
    }
    RawPacket p;
    p.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(body),
                  bytes.begin() + static_cast<std::ptrdiff_t>(offset));
    p.captured_len = incl_len;
    // Some writers emit orig_len smaller than incl_len; keep the invariant.
    p.original_len = std::max(orig_len, incl_len);
    p.timestamp_s = ts_sec;
    p.timestamp_us = ts_frac;
    p.link_type = result.info.link_type;
    result.packets.push_back(std::move(p));
  }
  return result;
}

PcapFileInfo open_pcap(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return parse_pcap(bytes).info;
}

ReadResult read_packets(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return parse_pcap(bytes);
}

std::vector<RawPacket> read_packets_strict(const std::filesystem::path& path) {
  auto result = read_packets(path);
  if (result.error) {
    throw Error(result.error->code(),
                path.string() + ": " + result.error->what());
  }
  return std::move(result.packets);
}

std::vector<std::uint8_t> serialize_pcap(std::span<const RawPacket> packets,
                                         std::uint32_t link_type,
                                         std::uint32_t snaplen) {
  std::size_t total = kGlobalHeaderSize;
  for (const auto& p : packets) {
    if (p.data.empty()) {
      throw Error(ErrorCode::EmptyPacket, "cannot write an empty packet");
    }
    snaplen = std::max<std::uint32_t>(
        snaplen, static_cast<std::uint32_t>(p.data.size()));
    total += kRecordHeaderSize + p.data.size();
  }

  std::vector<std::uint8_t> out;
  out.reserve(total);
  store_u32(out, kMagicMicros);
  store_u16(out, 2);
  store_u16(out, 4);
  store_u32(out, 0);  // thiszone
  store_u32(out, 0);  // sigfigs
  store_u32(out, snaplen);
  store_u32(out, link_type);
  for (const auto& p : packets) {
    const auto len = static_cast<std::uint32_t>(p.data.size());
    store_u32(out, p.timestamp_s);
    store_u32(out, p.timestamp_us);
    store_u32(out, len);
    store_u32(out, std::max(p.original_len, len));
    out.insert(out.end(), p.data.begin(), p.data.end());
  }
  return out;
}

void write_pcap(std::span<const RawPacket> packets, std::uint32_t link_type,
                const std::filesystem::path& path) {
  io::write_file(path, serialize_pcap(packets, link_type));
}

}  // namespace packetvision::pcap

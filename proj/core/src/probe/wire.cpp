#include "iwprobe/probe/wire.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace iwprobe::probe {

namespace {

void put16(std::vector<std::uint8_t>& out, std::size_t at, std::uint16_t v) {
  out[at] = static_cast<std::uint8_t>(v >> 8);
  out[at + 1] = static_cast<std::uint8_t>(v & 0xff);
}

void put32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  out[at] = static_cast<std::uint8_t>(v >> 24);
  out[at + 1] = static_cast<std::uint8_t>(v >> 16);
  out[at + 2] = static_cast<std::uint8_t>(v >> 8);
  out[at + 3] = static_cast<std::uint8_t>(v & 0xff);
}

std::uint16_t get16(std::span<const std::uint8_t> in, std::size_t at) {
  return static_cast<std::uint16_t>((in[at] << 8) | in[at + 1]);
}

std::uint32_t get32(std::span<const std::uint8_t> in, std::size_t at) {
  return (static_cast<std::uint32_t>(in[at]) << 24) |
         (static_cast<std::uint32_t>(in[at + 1]) << 16) |
         (static_cast<std::uint32_t>(in[at + 2]) << 8) |
         static_cast<std::uint32_t>(in[at + 3]);
}

constexpr std::uint8_t kFlagFin = 0x01;
constexpr std::uint8_t kFlagSyn = 0x02;
constexpr std::uint8_t kFlagRst = 0x04;
constexpr std::uint8_t kFlagPsh = 0x08;
constexpr std::uint8_t kFlagAck = 0x10;

std::uint8_t wire_flags(TcpFlags f) {
  std::uint8_t w = 0;
  if (f & kSyn) w |= kFlagSyn;
  if (f & kAck) w |= kFlagAck;
  if (f & kFin) w |= kFlagFin;
  if (f & kRst) w |= kFlagRst;
  if (f & kPsh) w |= kFlagPsh;
  return w;
}

TcpFlags local_flags(std::uint8_t w) {
  TcpFlags f = 0;
  if (w & kFlagSyn) f |= kSyn;
  if (w & kFlagAck) f |= kAck;
  if (w & kFlagFin) f |= kFin;
  if (w & kFlagRst) f |= kRst;
  if (w & kFlagPsh) f |= kPsh;
  return f;
}

}  // namespace

std::uint32_t parse_ipv4(const std::string& dotted) {
  std::uint32_t parts[4];
  int consumed = 0;
  if (std::sscanf(dotted.c_str(), "%u.%u.%u.%u%n", &parts[0], &parts[1],
                  &parts[2], &parts[3], &consumed) != 4 ||
      consumed != static_cast<int>(dotted.size()))
    throw std::invalid_argument("not an IPv4 address: " + dotted);
  for (auto p : parts)
    if (p > 255) throw std::invalid_argument("bad IPv4 octet: " + dotted);
  return (parts[0] << 24) | (parts[1] << 16) | (parts[2] << 8) | parts[3];
}

std::uint16_t internet_checksum(std::span<const std::uint8_t> data,
                                std::uint32_t initial) {
  std::uint32_t sum = initial;
  std::size_t i = 0;
  for (; i + 1 < data.size(); i += 2)
    sum += static_cast<std::uint32_t>((data[i] << 8) | data[i + 1]);
  if (i < data.size()) sum += static_cast<std::uint32_t>(data[i] << 8);
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum & 0xffff);
}

std::vector<std::uint8_t> encode_tcp(const TcpSegment& seg,
                                     const WireContext& ctx) {
  std::size_t opt_len = 0;
  if (seg.mss_option) opt_len += 4;
  if (seg.window_scale_option) opt_len += 3;
  opt_len = (opt_len + 3) & ~std::size_t{3};  // pad to 32-bit words
  const std::size_t header_len = 20 + opt_len;

  std::vector<std::uint8_t> out(header_len + seg.payload.size(), 0);
  put16(out, 0, ctx.src_port);
  put16(out, 2, ctx.dst_port);
  put32(out, 4, seg.seq);
  put32(out, 8, seg.ack);
  out[12] = static_cast<std::uint8_t>((header_len / 4) << 4);
  out[13] = wire_flags(seg.flags);
  put16(out, 14, seg.window);
  // checksum at 16..17 filled below, urgent pointer stays 0

  std::size_t at = 20;
  if (seg.mss_option) {
    out[at++] = 2;  // kind
    out[at++] = 4;  // length
    put16(out, at, *seg.mss_option);
    at += 2;
  }
  if (seg.window_scale_option) {
    out[at++] = 3;
    out[at++] = 3;
    out[at++] = *seg.window_scale_option;
  }
  while (at < header_len) out[at++] = 1;  // NOP padding

  std::memcpy(out.data() + header_len, seg.payload.data(), seg.payload.size());

  std::vector<std::uint8_t> pseudo(12, 0);
  put32(pseudo, 0, ctx.src_ip);
  put32(pseudo, 4, ctx.dst_ip);
  pseudo[9] = 6;  // IPPROTO_TCP
  put16(pseudo, 10, static_cast<std::uint16_t>(out.size()));

  std::uint32_t partial = 0;
  for (std::size_t i = 0; i + 1 < pseudo.size(); i += 2)
    partial += static_cast<std::uint32_t>((pseudo[i] << 8) | pseudo[i + 1]);
  const std::uint16_t checksum = internet_checksum(out, partial);
  put16(out, 16, checksum);
  return out;
}

std::optional<TcpSegment> decode_tcp(std::span<const std::uint8_t> bytes,
                                     WireContext* ctx) {
  if (bytes.size() < 20) return std::nullopt;
  const std::size_t header_len = (bytes[12] >> 4) * 4;
  if (header_len < 20 || header_len > bytes.size()) return std::nullopt;

  TcpSegment seg;
  if (ctx != nullptr) {
    ctx->src_port = get16(bytes, 0);
    ctx->dst_port = get16(bytes, 2);
  }
  seg.seq = get32(bytes, 4);
  seg.ack = get32(bytes, 8);
  seg.flags = local_flags(bytes[13]);
  seg.window = get16(bytes, 14);

  std::size_t at = 20;
  while (at < header_len) {
    const std::uint8_t kind = bytes[at];
    if (kind == 0) break;   // EOL
    if (kind == 1) {        // NOP
      ++at;
      continue;
    }
    if (at + 1 >= header_len) return std::nullopt;
    const std::uint8_t len = bytes[at + 1];
    if (len < 2 || at + len > header_len) return std::nullopt;
    if (kind == 2 && len == 4) seg.mss_option = get16(bytes, at + 2);
    if (kind == 3 && len == 3) seg.window_scale_option = bytes[at + 2];
    at += len;
  }

  seg.payload.assign(reinterpret_cast<const char*>(bytes.data()) + header_len,
                     bytes.size() - header_len);
  return seg;
}

}  // namespace iwprobe::probe

#include "iwprobe/probe/raw_transport.hpp"

#ifdef __linux__

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <system_error>

#include "iwprobe/probe/wire.hpp"

namespace iwprobe::probe {

namespace {

TimeNs monotonic_now() {
  timespec ts{};
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<TimeNs>(ts.tv_sec) * kSecond + ts.tv_nsec;
}

class RawTransport final : public Transport {
 public:
  RawTransport(const Endpoint& local, const Endpoint& remote)
      : local_(local), remote_(remote) {
    ctx_.src_ip = parse_ipv4(local.host);
    ctx_.dst_ip = parse_ipv4(remote.host);
    ctx_.src_port = local.port;
    ctx_.dst_port = remote.port;

    fd_ = ::socket(AF_INET, SOCK_RAW, IPPROTO_TCP);
    if (fd_ < 0)
      throw std::system_error(errno, std::generic_category(),
                              "raw socket (needs CAP_NET_RAW)");
  }

  ~RawTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  TimeNs now() override { return monotonic_now(); }

  void send(const TcpSegment& segment) override {
    const auto bytes = encode_tcp(segment, ctx_);
    sockaddr_in dst{};
    dst.sin_family = AF_INET;
    dst.sin_port = htons(remote_.port);
    dst.sin_addr.s_addr = htonl(ctx_.dst_ip);
    const auto n = ::sendto(fd_, bytes.data(), bytes.size(), 0,
                            reinterpret_cast<sockaddr*>(&dst), sizeof dst);
    if (n < 0)
      throw std::system_error(errno, std::generic_category(), "sendto");
  }

  std::optional<Delivered> receive(TimeNs deadline) override {
    std::uint8_t buf[65'536];
    for (;;) {
      const TimeNs now_ns = monotonic_now();
      if (now_ns >= deadline) return std::nullopt;
      pollfd pfd{fd_, POLLIN, 0};
      const int timeout_ms =
          static_cast<int>((deadline - now_ns + kMillisecond - 1) / kMillisecond);
      const int rc = ::poll(&pfd, 1, timeout_ms);
      if (rc == 0) return std::nullopt;
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw std::system_error(errno, std::generic_category(), "poll");
      }
      const auto n = ::recv(fd_, buf, sizeof buf, 0);
      if (n <= 0) continue;
      const TimeNs arrival = monotonic_now();

      // Raw IPv4 sockets deliver the IP header too.
      if (n < 20) continue;
      const std::size_t ip_header = (buf[0] & 0x0f) * 4;
      if ((buf[0] >> 4) != 4 || static_cast<std::size_t>(n) < ip_header + 20)
        continue;
      const std::uint32_t src_ip = (buf[12] << 24) | (buf[13] << 16) |
                                   (buf[14] << 8) | buf[15];
      const std::uint32_t dst_ip = (buf[16] << 24) | (buf[17] << 16) |
                                   (buf[18] << 8) | buf[19];
      if (src_ip != ctx_.dst_ip || dst_ip != ctx_.src_ip) continue;

      WireContext seen;
      auto seg = decode_tcp(
          std::span<const std::uint8_t>(buf + ip_header, n - ip_header), &seen);
      if (!seg) continue;
      if (seen.src_port != remote_.port || seen.dst_port != local_.port)
        continue;
      return Delivered{std::move(*seg), arrival};
    }
  }

  void sleep_until(TimeNs t) override {
    timespec ts{};
    ts.tv_sec = t / kSecond;
    ts.tv_nsec = t % kSecond;
    while (clock_nanosleep(CLOCK_MONOTONIC, TIMER_ABSTIME, &ts, nullptr) ==
           EINTR) {
    }
  }

 private:
  Endpoint local_;
  Endpoint remote_;
  WireContext ctx_;
  int fd_ = -1;
};

}  // namespace

std::unique_ptr<Transport> make_raw_transport(const Endpoint& local,
                                              const Endpoint& remote) {
  return std::make_unique<RawTransport>(local, remote);
}

bool raw_transport_supported() { return true; }

}  // namespace iwprobe::probe

#else  // !__linux__

#include <stdexcept>

namespace iwprobe::probe {

std::unique_ptr<Transport> make_raw_transport(const Endpoint&,
                                              const Endpoint&) {
  throw std::runtime_error("raw transport is Linux-only");
}

bool raw_transport_supported() { return false; }

}  // namespace iwprobe::probe

#endif

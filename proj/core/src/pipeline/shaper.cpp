#include "iwprobe/pipeline/shaper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iwprobe::pipeline {

namespace {

TimeNs steady_now() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

TokenBucket::TokenBucket(double pps, double depth)
    : pps_(pps), depth_(depth > 0.0 ? depth : pps), tokens_(depth_) {
  if (pps < 1.0) throw std::invalid_argument("pps must be >= 1");
}

void TokenBucket::refill_locked(TimeNs now) {
  if (!primed_) {
    primed_ = true;
    last_refill_ = now;
    return;
  }
  if (now <= last_refill_) return;
  const double gained =
      static_cast<double>(now - last_refill_) * pps_ / 1e9;
  tokens_ = std::min(depth_, tokens_ + gained);
  last_refill_ = now;
}

TimeNs TokenBucket::reserve_at(TimeNs now) {
  std::lock_guard<std::mutex> lock(mutex_);
  refill_locked(now);
  if (tokens_ >= 1.0) {
    tokens_ -= 1.0;
    return now;
  }
  const double deficit = 1.0 - tokens_;
  const TimeNs wait =
      static_cast<TimeNs>(std::ceil(deficit * 1e9 / pps_));
  const TimeNs grant = now + wait;
  // Account the token as consumed at grant time.
  tokens_ += static_cast<double>(wait) * pps_ / 1e9 - 1.0;
  last_refill_ = grant;
  return grant;
}

bool TokenBucket::acquire() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (shutdown_) return false;
  }
  const TimeNs grant = reserve_at(steady_now());
  std::unique_lock<std::mutex> lock(mutex_);
  while (!shutdown_ && steady_now() < grant) {
    const auto deadline = std::chrono::steady_clock::time_point(
        std::chrono::nanoseconds(grant));
    cv_.wait_until(lock, deadline);
  }
  return !shutdown_;
}

void TokenBucket::shutdown() {
  std::lock_guard<std::mutex> lock(mutex_);
  shutdown_ = true;
  cv_.notify_all();
}

}  // namespace iwprobe::pipeline

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <thread>

namespace scout {

/// Monotonic millisecond time source. Every time-dependent decision in the
/// pipeline reads through this interface so runs can execute on either the
/// real clock or a simulated one with identical behavior.
class Clock {
 public:
  virtual ~Clock() = default;

  virtual std::int64_t now_ms() const = 0;

  /// Block (or virtually advance) until the given deadline has passed.
  virtual void sleep_until_ms(std::int64_t deadline_ms) = 0;

  void sleep_ms(std::int64_t duration_ms) {
    if (duration_ms <= 0) return;
    sleep_until_ms(now_ms() + duration_ms);
  }
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_ms() const override {
    auto delta = std::chrono::steady_clock::now() - epoch_;
    return std::chrono::duration_cast<std::chrono::milliseconds>(delta).count();
  }

  void sleep_until_ms(std::int64_t deadline_ms) override {
    std::this_thread::sleep_until(epoch_ + std::chrono::milliseconds(deadline_ms));
  }

 private:
  std::chrono::steady_clock::time_point epoch_ = std::chrono::steady_clock::now();
};

/// Virtual clock for hermetic tests. sleep_until_ms advances time to the
/// deadline and returns immediately. Concurrent sleepers that captured the
/// same start time coalesce to the latest deadline, so a parallel fan-out
/// advances the clock by its slowest leg rather than the sum of all legs.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(std::int64_t start_ms = 0) : now_(start_ms) {}

  std::int64_t now_ms() const override {
    std::lock_guard<std::mutex> lock(mutex_);
    return now_;
  }

  void sleep_until_ms(std::int64_t deadline_ms) override {
    std::lock_guard<std::mutex> lock(mutex_);
    now_ = std::max(now_, deadline_ms);
  }

  void advance_ms(std::int64_t duration_ms) {
    std::lock_guard<std::mutex> lock(mutex_);
    now_ += duration_ms;
  }

 private:
  mutable std::mutex mutex_;
  std::int64_t now_;
};

}  // namespace scout

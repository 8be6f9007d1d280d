#pragma once

#include <chrono>

namespace hri::orch {

/// Stage timing source. Simulated latencies are charged with advance(),
/// which a real clock ignores: there the latency is whatever the call took.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
  virtual void advance(double seconds) = 0;
  virtual bool simulated() const = 0;
};

class SimClock final : public Clock {
 public:
  double now() const override { return t_; }
  void advance(double seconds) override {
    if (seconds > 0.0) t_ += seconds;
  }
  bool simulated() const override { return true; }

 private:
  double t_ = 0.0;
};

class SteadyClock final : public Clock {
 public:
  double now() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  void advance(double) override {}
  bool simulated() const override { return false; }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace hri::orch

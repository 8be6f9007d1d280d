#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hri/audio/chunker.hpp"
#include "hri/audio/wake.hpp"

namespace hri::audio {

/// Bounded FIFO. When full, push either evicts the oldest item (returning
/// true) or blocks until there is room.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity, bool block_when_full = false)
      : capacity_(capacity ? capacity : 1), block_(block_when_full) {}

  bool push(T item) {
    std::unique_lock lock(mu_);
    bool dropped = false;
    if (block_) {
      not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
      if (closed_) return false;
    } else if (items_.size() >= capacity_) {
      items_.pop_front();
      dropped = true;
    }
    items_.push_back(std::move(item));
    not_empty_.notify_one();
    return dropped;
  }

  std::optional<T> pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

  /// Wakes all waiters; queued items remain poppable.
  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }

 private:
  std::size_t capacity_;
  bool block_;
  mutable std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  bool closed_ = false;
};

class SampleSource {
 public:
  virtual ~SampleSource() = default;
  /// Fills up to out.size() samples; 0 means end of stream.
  virtual std::size_t read(std::span<double> out) = 0;
};

class BufferSource final : public SampleSource {
 public:
  explicit BufferSource(std::vector<double> samples) : samples_(std::move(samples)) {}
  std::size_t read(std::span<double> out) override;

 private:
  std::vector<double> samples_;
  std::size_t pos_ = 0;
};

struct ListenerConfig {
  ChunkConfig chunk;
  WakeConfig wake;
  std::size_t queue_capacity = 16;  // windows
  bool block_when_full = false;     // default drops the oldest window
  std::size_t read_block = 1600;    // samples per source read
  bool stop_on_wake = true;
  std::function<void(const std::string&)> log;  // warnings; stderr if empty
};

struct ListenerStats {
  std::size_t windows = 0;     // produced by the chunker
  std::size_t classified = 0;
  std::size_t dropped = 0;     // evicted by back-pressure
  std::size_t failures = 0;    // classifier threw; window skipped
  std::size_t wakes = 0;
};

/// Producer thread reads and chunks; the calling thread classifies.
class WakeListener {
 public:
  WakeListener(ListenerConfig cfg, WakeClassifier& classifier);

  /// Runs until the source ends, stop() is called, or (with stop_on_wake)
  /// the first wake. Returns the first wake event, if any.
  std::optional<WakeEvent> run(SampleSource& source,
                               const std::function<void(const WakeEvent&)>& on_wake = {});
  void stop() { stop_ = true; }
  ListenerStats stats() const;

 private:
  void warn(const std::string& msg) const;

  ListenerConfig cfg_;
  WakeClassifier& classifier_;
  std::atomic<bool> stop_{false};
  mutable std::mutex stats_mu_;
  ListenerStats stats_;
};

}  // namespace hri::audio

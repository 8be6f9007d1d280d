#include "hri/audio/listener.hpp"

#include <algorithm>
#include <iostream>
#include <thread>

namespace hri::audio {

std::size_t BufferSource::read(std::span<double> out) {
  const std::size_t n = std::min(out.size(), samples_.size() - pos_);
  std::copy_n(samples_.begin() + static_cast<std::ptrdiff_t>(pos_), n, out.begin());
  pos_ += n;
  return n;
}

WakeListener::WakeListener(ListenerConfig cfg, WakeClassifier& classifier)
    : cfg_(std::move(cfg)), classifier_(classifier) {
  cfg_.chunk.validate();
  cfg_.wake.validate();
  if (cfg_.read_block == 0) throw std::invalid_argument("read_block must be positive");
}

void WakeListener::warn(const std::string& msg) const {
  if (cfg_.log) {
    cfg_.log(msg);
  } else {
    std::cerr << "warning: " << msg << '\n';
  }
}

ListenerStats WakeListener::stats() const {
  std::lock_guard lock(stats_mu_);
  return stats_;
}

std::optional<WakeEvent> WakeListener::run(SampleSource& source,
                                           const std::function<void(const WakeEvent&)>& on_wake) {
  stop_ = false;
  {
    std::lock_guard lock(stats_mu_);
    stats_ = {};
  }
  BoundedQueue<AudioWindow> queue(cfg_.queue_capacity, cfg_.block_when_full);

  std::thread producer([&] {
    Chunker chunker(cfg_.chunk);
    std::vector<double> block(cfg_.read_block);
    auto emit = [&](std::vector<AudioWindow> windows) {
      for (auto& w : windows) {
        const bool dropped = queue.push(std::move(w));
        std::lock_guard lock(stats_mu_);
        ++stats_.windows;
        if (dropped) ++stats_.dropped;
      }
    };
    try {
      while (!stop_) {
        const std::size_t n = source.read(block);
        if (n == 0) break;
        emit(chunker.push(std::span<const double>(block.data(), n)));
      }
      if (!stop_) emit(chunker.finish());
    } catch (const std::exception& e) {
      warn(std::string("audio source failed: ") + e.what());
    }
    queue.close();
  });

  std::optional<WakeEvent> first;
  std::size_t dropped_seen = 0;
  while (auto w = queue.pop()) {
    if (stop_) break;
    DetectionResult r;
    try {
      r = classifier_.classify(*w);
    } catch (const std::exception& e) {
      warn("classifier failed on window " + std::to_string(w->index) + ": " + e.what());
      std::lock_guard lock(stats_mu_);
      ++stats_.failures;
      continue;
    }
    bool woke = wake_predicate(r, cfg_.wake);
    {
      std::lock_guard lock(stats_mu_);
      ++stats_.classified;
      if (woke) ++stats_.wakes;
      if (stats_.dropped > dropped_seen) {
        warn("dropped " + std::to_string(stats_.dropped - dropped_seen) + " window(s)");
        dropped_seen = stats_.dropped;
      }
    }
    if (!woke) continue;
    WakeEvent ev{w->index, w->start_time, w->start_time + cfg_.chunk.chunk_seconds, r};
    if (on_wake) on_wake(ev);
    if (!first) first = ev;
    if (cfg_.stop_on_wake) {
      stop_ = true;
      break;
    }
  }
  queue.close();
  producer.join();
  return first;
}

}  // namespace hri::audio

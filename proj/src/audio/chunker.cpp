#include "hri/audio/chunker.hpp"

#include <cmath>
#include <stdexcept>

namespace hri::audio {

namespace {

std::size_t whole_samples(double seconds, double rate, const char* what) {
  const double n = seconds * rate;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-6 || r < 1.0) {
    throw std::invalid_argument(std::string(what) + " must be a whole number of samples");
  }
  return static_cast<std::size_t>(r);
}

}  // namespace

void ChunkConfig::validate() const {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be positive");
  if (!(step_seconds > 0.0)) throw std::invalid_argument("step_seconds must be positive");
  if (!(step_seconds <= chunk_seconds)) {
    throw std::invalid_argument("step_seconds must not exceed chunk_seconds");
  }
  whole_samples(chunk_seconds, sample_rate, "chunk_seconds");
  whole_samples(step_seconds, sample_rate, "step_seconds");
}

std::size_t ChunkConfig::chunk_samples() const {
  return whole_samples(chunk_seconds, sample_rate, "chunk_seconds");
}

std::size_t ChunkConfig::step_samples() const {
  return whole_samples(step_seconds, sample_rate, "step_seconds");
}

Chunker::Chunker(ChunkConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  chunk_ = cfg_.chunk_samples();
  step_ = cfg_.step_samples();
}

std::vector<AudioWindow> Chunker::push(std::span<const double> samples) {
  if (finished_) throw std::logic_error("Chunker::push after finish");
  buffer_.insert(buffer_.end(), samples.begin(), samples.end());
  std::vector<AudioWindow> out;
  while (true) {
    const std::size_t start = emitted_ * step_;
    if (start + chunk_ > consumed_ + buffer_.size()) break;
    const auto first = buffer_.begin() + static_cast<std::ptrdiff_t>(start - consumed_);
    AudioWindow w;
    w.samples.assign(first, first + static_cast<std::ptrdiff_t>(chunk_));
    w.start_time = static_cast<double>(start) / cfg_.sample_rate;
    w.index = emitted_++;
    out.push_back(std::move(w));
  }
  const std::size_t next = emitted_ * step_;
  if (next > consumed_) {
    const std::size_t drop = std::min(next - consumed_, buffer_.size());
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(drop));
    consumed_ += drop;
  }
  return out;
}

std::vector<AudioWindow> Chunker::finish() {
  if (finished_) return {};
  finished_ = true;
  const std::size_t total = consumed_ + buffer_.size();
  const std::size_t covered = emitted_ == 0 ? 0 : (emitted_ - 1) * step_ + chunk_;
  if (total == 0 || (emitted_ > 0 && covered >= total)) return {};
  const std::size_t start = emitted_ * step_;
  AudioWindow w;
  w.samples.assign(chunk_, 0.0);
  for (std::size_t i = start; i < total; ++i) w.samples[i - start] = buffer_[i - consumed_];
  w.start_time = static_cast<double>(start) / cfg_.sample_rate;
  w.index = emitted_++;
  w.padded = true;
  return {std::move(w)};
}

std::vector<AudioWindow> chunk_stream(std::span<const double> stream, const ChunkConfig& cfg) {
  Chunker c(cfg);
  auto out = c.push(stream);
  for (auto& w : c.finish()) out.push_back(std::move(w));
  return out;
}

}  // namespace hri::audio

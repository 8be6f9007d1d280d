#include "hri/audio/endpoint.hpp"

#include <cmath>
#include <stdexcept>

namespace hri::audio {

void EndpointConfig::validate() const {
  if (!(amp_threshold > 0.0)) throw std::invalid_argument("amp_threshold must be positive");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be positive");
  if (!(frame_seconds > 0.0)) throw std::invalid_argument("frame_seconds must be positive");
  if (!(silence_seconds >= frame_seconds)) {
    throw std::invalid_argument("silence_seconds must cover at least one frame");
  }
  if (frame_samples() == 0) throw std::invalid_argument("frame shorter than one sample");
}

std::size_t EndpointConfig::frame_samples() const {
  return static_cast<std::size_t>(std::lround(frame_seconds * sample_rate));
}

std::size_t EndpointConfig::silent_frames_needed() const {
  return static_cast<std::size_t>(std::ceil(silence_seconds / frame_seconds - 1e-9));
}

Endpointer::Endpointer(EndpointConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  frame_ = cfg_.frame_samples();
  needed_ = cfg_.silent_frames_needed();
}

std::size_t Endpointer::push(std::span<const double> samples) {
  std::size_t taken = 0;
  while (!done_ && taken < samples.size()) {
    const double s = samples[taken++];
    utt_.samples.push_back(s);
    frame_sq_ += s * s;
    if (++frame_fill_ < frame_) continue;
    const double r = std::sqrt(frame_sq_ / static_cast<double>(frame_));
    if (r < cfg_.amp_threshold) {
      if (++silent_run_ >= needed_) done_ = true;
    } else {
      silent_run_ = 0;
      utt_.speech = true;
    }
    frame_fill_ = 0;
    frame_sq_ = 0.0;
  }
  return taken;
}

double Endpointer::elapsed() const {
  return static_cast<double>(utt_.samples.size()) / cfg_.sample_rate;
}

Utterance Endpointer::finish() {
  utt_.truncated = !done_;
  Utterance out = std::move(utt_);
  utt_ = {};
  return out;
}

Utterance endpoint_silence(std::span<const double> stream, const EndpointConfig& cfg) {
  Endpointer e(cfg);
  e.push(stream);
  return e.finish();
}

double rms(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double sq = 0.0;
  for (double s : samples) sq += s * s;
  return std::sqrt(sq / static_cast<double>(samples.size()));
}

}  // namespace hri::audio

#include "hri/audio/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hri::audio {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    if (!in_ || !out_) {
      release();
      throw std::bad_alloc();
    }
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    if (!plan_) {
      release();
      throw std::runtime_error("fftw: plan creation failed");
    }
  }
  ~RealFft() { release(); }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }

  void execute(std::vector<std::complex<double>>& out) {
    fftw_execute(plan_);
    out.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {out_[k][0], out_[k][1]};
  }

 private:
  void release() {
    if (plan_) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
      plan_ = nullptr;
    }
    if (in_) fftw_free(in_);
    if (out_) fftw_free(out_);
    in_ = nullptr;
    out_ = nullptr;
  }

  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Integral of a piecewise-linear function through (xs[i], ys[i]) over [a, b];
// zero outside [xs.front(), xs.back()].
double integrate_linear(const double (&xs)[3], const double (&ys)[3], double a, double b) {
  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double x0 = xs[i];
    const double x1 = xs[i + 1];
    const double lo = std::max(a, x0);
    const double hi = std::min(b, x1);
    if (!(hi > lo) || !(x1 > x0)) continue;
    auto f = [&](double x) { return ys[i] + (ys[i + 1] - ys[i]) * (x - x0) / (x1 - x0); };
    total += 0.5 * (f(lo) + f(hi)) * (hi - lo);
  }
  return total;
}

}  // namespace

double hann(std::size_t n, std::size_t length) {
  return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                              static_cast<double>(length));
}

double rectangular(std::size_t, std::size_t) { return 1.0; }

void StftConfig::validate() const {
  if (frame_len == 0 || hop == 0) throw std::invalid_argument("stft: frame_len and hop must be > 0");
  if (!power_of_two(fft_size)) throw std::invalid_argument("stft: fft_size must be a power of two");
  if (fft_size < frame_len) throw std::invalid_argument("stft: fft_size must be >= frame_len");
}

std::size_t StftConfig::frame_count(std::size_t samples) const {
  return samples < frame_len ? 0 : (samples - frame_len) / hop + 1;
}

Spectrogram stft(std::span<const double> samples, const StftConfig& cfg, const Taper& taper) {
  cfg.validate();
  if (samples.size() < cfg.frame_len) {
    throw std::invalid_argument("stft: input shorter than one frame");
  }
  std::vector<double> w(cfg.frame_len);
  for (std::size_t n = 0; n < cfg.frame_len; ++n) w[n] = taper(n, cfg.frame_len);

  RealFft fft(cfg.fft_size);
  double* in = fft.input();
  Spectrogram out(cfg.frame_count(samples.size()));
  for (std::size_t t = 0; t < out.size(); ++t) {
    const std::size_t base = t * cfg.hop;
    for (std::size_t n = 0; n < cfg.frame_len; ++n) in[n] = samples[base + n] * w[n];
    std::fill(in + cfg.frame_len, in + cfg.fft_size, 0.0);
    fft.execute(out[t]);
  }
  return out;
}

double spectral_energy(std::span<const std::complex<double>> half, std::size_t fft_size) {
  if (half.size() != fft_size / 2 + 1) throw std::invalid_argument("spectral_energy: size mismatch");
  double sum = std::norm(half.front()) + std::norm(half.back());
  for (std::size_t k = 1; k + 1 < half.size(); ++k) sum += 2.0 * std::norm(half[k]);
  return sum / static_cast<double>(fft_size);
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(std::size_t bands, std::size_t fft_size, double sample_rate,
                             double fmin, double fmax)
    : bands_(bands), bins_(fft_size / 2 + 1) {
  if (bands == 0) throw std::invalid_argument("mel: need at least one band");
  if (!power_of_two(fft_size)) throw std::invalid_argument("mel: fft_size must be a power of two");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("mel: sample_rate must be positive");
  if (fmax < 0.0) fmax = sample_rate / 2.0;
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0)) {
    throw std::invalid_argument("mel: need 0 <= fmin < fmax <= sample_rate/2");
  }
  const double m_lo = hz_to_mel(fmin);
  const double m_hi = hz_to_mel(fmax);
  std::vector<double> edges(bands + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(m_lo + (m_hi - m_lo) * static_cast<double>(i) /
                                    static_cast<double>(bands + 1));
  }
  const double df = sample_rate / static_cast<double>(fft_size);
  weights_.assign(bands, std::vector<double>(bins_, 0.0));
  centers_.resize(bands);
  for (std::size_t m = 0; m < bands; ++m) {
    const double xs[3] = {edges[m], edges[m + 1], edges[m + 2]};
    const double ys[3] = {0.0, 1.0, 0.0};
    centers_[m] = xs[1];
    for (std::size_t k = 0; k < bins_; ++k) {
      const double a = (static_cast<double>(k) - 0.5) * df;
      const double b = (static_cast<double>(k) + 0.5) * df;
      weights_[m][k] = integrate_linear(xs, ys, a, b) / df;
    }
  }
}

std::vector<double> MelFilterbank::apply(std::span<const double> power) const {
  if (power.size() != bins_) throw std::invalid_argument("mel: power spectrum size mismatch");
  std::vector<double> out(bands_, 0.0);
  for (std::size_t m = 0; m < bands_; ++m) {
    const auto& w = weights_[m];
    double e = 0.0;
    for (std::size_t k = 0; k < bins_; ++k) e += w[k] * power[k];
    out[m] = e;
  }
  return out;
}

std::vector<FeatureFrame> log_mel(const Spectrogram& spec, const MelFilterbank& bank,
                                  const StftConfig& cfg, double sample_rate, double start_time) {
  std::vector<FeatureFrame> out;
  out.reserve(spec.size());
  std::vector<double> power(bank.bins());
  for (std::size_t t = 0; t < spec.size(); ++t) {
    if (spec[t].size() != bank.bins()) throw std::invalid_argument("log_mel: bin count mismatch");
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(spec[t][k]);
    FeatureFrame f;
    f.log_mel = bank.apply(power);
    for (double& e : f.log_mel) e = std::log(std::max(e, kLogFloor));
    f.frame_time = start_time + static_cast<double>(t * cfg.hop) / sample_rate;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<FeatureFrame> log_mel_features(std::span<const double> samples, double sample_rate,
                                           double start_time) {
  const StftConfig cfg;
  static const MelFilterbank bank16k(128, cfg.fft_size, 16000.0);
  if (sample_rate == 16000.0) {
    return log_mel(stft(samples, cfg), bank16k, cfg, sample_rate, start_time);
  }
  const MelFilterbank bank(128, cfg.fft_size, sample_rate);
  return log_mel(stft(samples, cfg), bank, cfg, sample_rate, start_time);
}

std::vector<double> mfcc(std::span<const double> log_mel, std::size_t count) {
  const std::size_t n = log_mel.size();
  if (n == 0) throw std::invalid_argument("mfcc: empty frame");
  count = std::min(count, n);
  std::vector<double> out(count, 0.0);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < count; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += log_mel[i] *
           std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(i) + 0.5) / nn);
    }
    out[k] = s * std::sqrt((k == 0 ? 1.0 : 2.0) / nn);
  }
  return out;
}

}  // namespace hri::audio

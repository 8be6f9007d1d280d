#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hri::audio {

using Taper = std::function<double(std::size_t n, std::size_t length)>;

/// Periodic Hann taper.
double hann(std::size_t n, std::size_t length);
double rectangular(std::size_t n, std::size_t length);

struct StftConfig {
  std::size_t frame_len = 400;  // 25 ms at 16 kHz
  std::size_t hop = 160;        // 10 ms
  std::size_t fft_size = 512;   // power of two, >= frame_len

  void validate() const;
  std::size_t bins() const { return fft_size / 2 + 1; }
  std::size_t frame_count(std::size_t samples) const;
};

/// One row per frame, fft_size/2 + 1 non-negative-frequency bins each.
using Spectrogram = std::vector<std::vector<std::complex<double>>>;

/// Frame τ covers samples [τ·hop, τ·hop + frame_len), tapered and
/// zero-padded to fft_size. Throws std::invalid_argument if the input is
/// shorter than one frame.
Spectrogram stft(std::span<const double> samples, const StftConfig& cfg,
                 const Taper& taper = hann);

/// Energy of the full two-sided spectrum reconstructed from the half
/// spectrum, divided by fft_size; equals the frame's time-domain energy.
double spectral_energy(std::span<const std::complex<double>> half, std::size_t fft_size);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filters evenly spaced on the mel scale over [fmin, fmax].
/// Each weight is the triangle's mean over that bin's frequency span, so
/// every filter touches at least one bin even when narrower than a bin.
class MelFilterbank {
 public:
  MelFilterbank(std::size_t bands = 128, std::size_t fft_size = 512, double sample_rate = 16000.0,
                double fmin = 0.0, double fmax = -1.0);

  std::size_t bands() const { return bands_; }
  std::size_t bins() const { return bins_; }
  const std::vector<double>& row(std::size_t band) const { return weights_[band]; }
  /// Center frequency of each band in Hz.
  const std::vector<double>& centers() const { return centers_; }

  std::vector<double> apply(std::span<const double> power) const;

 private:
  std::size_t bands_;
  std::size_t bins_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> centers_;
};

inline constexpr double kLogFloor = 1e-10;

struct FeatureFrame {
  std::vector<double> log_mel;
  double frame_time = 0.0;  // start of the frame, seconds
};

/// Natural log of floored filterbank energies of |X|², one per frame.
std::vector<FeatureFrame> log_mel(const Spectrogram& spec, const MelFilterbank& bank,
                                  const StftConfig& cfg, double sample_rate,
                                  double start_time = 0.0);

/// Convenience: stft then log_mel with the default geometry.
std::vector<FeatureFrame> log_mel_features(std::span<const double> samples,
                                           double sample_rate = 16000.0,
                                           double start_time = 0.0);

/// Orthonormal DCT-II of a log-mel frame, first `count` coefficients.
std::vector<double> mfcc(std::span<const double> log_mel, std::size_t count = 13);

}  // namespace hri::audio

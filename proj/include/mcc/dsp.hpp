#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mcc/tsdist.hpp"

namespace mcc::dsp {

struct FilterSpec {
  std::size_t smoothing_window = 10;  // samples
  double highpass_cutoff = 1.5;       // Hz
  std::size_t highpass_order = 2;     // even
  double sample_rate = 50.0;          // Hz
};

struct WindowSpec {
  double window_len = 0.4;            // seconds
  std::optional<double> stride = 0.1; // seconds; empty = one sample

  static WindowSpec single_sample(double window_len = 0.4) { return {window_len, std::nullopt}; }
};

/// Equal-length channels, e.g. {ax, ay, az}.
using Channels = std::vector<Series>;

/// Second-order section, normalised so a0 = 1.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

/// Digital Butterworth high-pass as cascaded biquads: analog prototype,
/// frequency pre-warping, bilinear transform.
std::vector<Biquad> design_butterworth_highpass(const FilterSpec& spec);

/// |H(e^{j 2 pi f / fs})| of a section cascade.
double cascade_magnitude(std::span<const Biquad> sections, double freq, double sample_rate);

/// Trailing mean over `window` samples; the first samples average the
/// available prefix.
Series moving_average(std::span<const double> x, std::size_t window);

/// Causal filtering. Section states start at the steady state for a constant
/// input equal to x[0], so a DC offset produces no start-up transient.
Series butterworth_highpass(std::span<const double> x, const FilterSpec& spec);

/// Smoothing followed by high-pass.
Series preprocess(std::span<const double> x, const FilterSpec& spec);

std::size_t window_samples(const WindowSpec& spec, double sample_rate);
std::size_t stride_samples(const WindowSpec& spec, double sample_rate);

/// First sample of the window centred on `center_ts`: round(center * rate)
/// minus half the window (even lengths sit one sample left of centre).
/// Throws a bounds error when the window does not fit in `length` samples.
std::size_t centered_start(double center_ts, const WindowSpec& spec, double sample_rate,
                           std::size_t length);

Channels slice_centered(const Channels& x, double center_ts, const WindowSpec& spec,
                        double sample_rate);

/// Start indices 0, s, 2s, ... of every full window; empty when the
/// recording is shorter than one window.
std::vector<std::size_t> window_starts(std::size_t length, std::size_t window, std::size_t stride);

struct Window {
  std::size_t start = 0;
  Channels channels;
};

std::vector<Window> slide_windows(const Channels& x, const WindowSpec& spec, double sample_rate);

}  // namespace mcc::dsp

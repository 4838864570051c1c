#include "mcc/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "mcc/error.hpp"

namespace mcc::dsp {
namespace {

void check_channels(const Channels& x) {
  if (x.empty()) fail(ErrorKind::domain, "no channels");
  for (const auto& ch : x) {
    if (ch.size() != x.front().size()) fail(ErrorKind::dimension, "channels differ in length");
  }
}

}  // namespace

std::vector<Biquad> design_butterworth_highpass(const FilterSpec& spec) {
  const double nyquist = spec.sample_rate / 2.0;
  if (!(spec.sample_rate > 0.0)) fail(ErrorKind::domain, "highpass: sample rate must be > 0");
  if (!(spec.highpass_cutoff > 0.0) || spec.highpass_cutoff >= nyquist) {
    fail(ErrorKind::domain, "highpass: cutoff must lie in (0, Nyquist)");
  }
  if (spec.highpass_order == 0 || spec.highpass_order % 2 != 0) {
    fail(ErrorKind::domain, "highpass: order must be a positive even integer");
  }

  const double k = std::tan(std::numbers::pi * spec.highpass_cutoff / spec.sample_rate);
  const double k2 = k * k;
  const std::size_t n = spec.highpass_order;
  std::vector<Biquad> sections;
  for (std::size_t i = 0; i < n / 2; ++i) {
    // Pole pair i of the order-n prototype sits at angle theta from the
    // negative real axis; Q = 1 / (2 cos theta).
    const double theta = std::numbers::pi * static_cast<double>(2 * i + 1) / static_cast<double>(2 * n);
    const double q = 1.0 / (2.0 * std::cos(theta));
    const double norm = 1.0 / (1.0 + k / q + k2);
    sections.push_back({norm, -2.0 * norm, norm, 2.0 * (k2 - 1.0) * norm,
                        (1.0 - k / q + k2) * norm});
  }
  return sections;
}

double cascade_magnitude(std::span<const Biquad> sections, double freq, double sample_rate) {
  const double w = 2.0 * std::numbers::pi * freq / sample_rate;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h(1.0, 0.0);
  for (const auto& s : sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return std::abs(h);
}

Series moving_average(std::span<const double> x, std::size_t window) {
  if (window < 1) fail(ErrorKind::domain, "moving_average: window must be >= 1");
  Series out(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i];
    if (i >= window) sum -= x[i - window];
    const std::size_t count = std::min(i + 1, window);
    out[i] = sum / static_cast<double>(count);
  }
  return out;
}

Series butterworth_highpass(std::span<const double> x, const FilterSpec& spec) {
  const auto sections = design_butterworth_highpass(spec);
  if (x.size() < spec.highpass_order) {
    fail(ErrorKind::domain, "highpass: input shorter than filter order");
  }
  Series y(x.begin(), x.end());
  for (const auto& s : sections) {
    // Transposed direct form II, initialised at steady state for y[0].
    const double x0 = y.front();
    const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double y0 = dc * x0;
    double z2 = s.b2 * x0 - s.a2 * y0;
    double z1 = s.b1 * x0 - s.a1 * y0 + z2;
    for (auto& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

Series preprocess(std::span<const double> x, const FilterSpec& spec) {
  return butterworth_highpass(moving_average(x, spec.smoothing_window), spec);
}

std::size_t window_samples(const WindowSpec& spec, double sample_rate) {
  if (!(spec.window_len > 0.0)) fail(ErrorKind::domain, "window length must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(spec.window_len * sample_rate));
  if (n == 0) fail(ErrorKind::domain, "window shorter than one sample");
  return n;
}

std::size_t stride_samples(const WindowSpec& spec, double sample_rate) {
  if (!spec.stride) return 1;
  if (!(*spec.stride > 0.0)) fail(ErrorKind::domain, "stride must be > 0");
  const auto n = std::llround(*spec.stride * sample_rate);
  return n < 1 ? 1 : static_cast<std::size_t>(n);
}

std::size_t centered_start(double center_ts, const WindowSpec& spec, double sample_rate,
                           std::size_t length) {
  const std::size_t len = window_samples(spec, sample_rate);
  const long long center = std::llround(center_ts * sample_rate);
  const long long start = center - static_cast<long long>(len / 2);
  if (start < 0 || start + static_cast<long long>(len) > static_cast<long long>(length)) {
    fail(ErrorKind::bounds, "window centred at " + std::to_string(center_ts) +
                                " s does not fit in a recording of " + std::to_string(length) +
                                " samples");
  }
  return static_cast<std::size_t>(start);
}

Channels slice_centered(const Channels& x, double center_ts, const WindowSpec& spec,
                        double sample_rate) {
  check_channels(x);
  const std::size_t len = window_samples(spec, sample_rate);
  const std::size_t start = centered_start(center_ts, spec, sample_rate, x.front().size());
  Channels out;
  out.reserve(x.size());
  for (const auto& ch : x) {
    out.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(start),
                     ch.begin() + static_cast<std::ptrdiff_t>(start + len));
  }
  return out;
}

std::vector<std::size_t> window_starts(std::size_t length, std::size_t window, std::size_t stride) {
  std::vector<std::size_t> starts;
  if (window == 0 || stride == 0 || length < window) return starts;
  for (std::size_t s = 0; s + window <= length; s += stride) starts.push_back(s);
  return starts;
}

std::vector<Window> slide_windows(const Channels& x, const WindowSpec& spec, double sample_rate) {
  check_channels(x);
  const std::size_t len = window_samples(spec, sample_rate);
  std::vector<Window> out;
  for (std::size_t start : window_starts(x.front().size(), len, stride_samples(spec, sample_rate))) {
    Window w;
    w.start = start;
    for (const auto& ch : x) {
      w.channels.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(start),
                              ch.begin() + static_cast<std::ptrdiff_t>(start + len));
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace mcc::dsp

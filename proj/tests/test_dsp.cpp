#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mcc/dsp.hpp"
#include "mcc/error.hpp"
#include "oracles.hpp"

using mcc::Series;
namespace dsp = mcc::dsp;

namespace {

// Bilinear-transformed Butterworth high-pass with pre-warped cutoff.
double butterworth_hp_gain(double f, double fc, double fs, int order) {
  const double r = std::tan(std::numbers::pi * f / fs) / std::tan(std::numbers::pi * fc / fs);
  return std::pow(r, order) / std::sqrt(1.0 + std::pow(r, 2 * order));
}

// Peak amplitude over the last second of a filtered unit sinusoid.
double filtered_amplitude(double f, const dsp::FilterSpec& spec) {
  const std::size_t n = static_cast<std::size_t>(spec.sample_rate * 20);
  Series x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2 * std::numbers::pi * f * i / spec.sample_rate);
  const auto y = dsp::butterworth_highpass(x, spec);
  double peak = 0.0;
  for (std::size_t i = n - static_cast<std::size_t>(spec.sample_rate * 4); i < n; ++i)
    peak = std::max(peak, std::abs(y[i]));
  return peak;
}

dsp::Channels ramp_channels(std::size_t n) {
  dsp::Channels c(3, Series(n));
  for (std::size_t i = 0; i < n; ++i) {
    c[0][i] = static_cast<double>(i);
    c[1][i] = -static_cast<double>(i);
    c[2][i] = 0.5 * static_cast<double>(i);
  }
  return c;
}

}  // namespace

TEST_CASE("moving average") {
  CHECK(dsp::moving_average(Series{2, 2, 2, 2}, 3) == Series{2, 2, 2, 2});
  CHECK(dsp::moving_average(Series{0, 4}, 2) == Series{0, 2});
  CHECK(dsp::moving_average(Series{1, 2, 3, 4}, 2) == Series{1, 1.5, 2.5, 3.5});
  CHECK_THROWS_AS(dsp::moving_average(Series{1}, 0), mcc::Error);

  std::mt19937_64 rng(3);
  const auto x = oracle::random_series(rng, 2000, -1, 1);
  const auto y = dsp::moving_average(x, 10);
  auto var = [](const Series& s) {
    double m = 0, v = 0;
    for (double a : s) m += a;
    m /= s.size();
    for (double a : s) v += (a - m) * (a - m);
    return v / s.size();
  };
  CHECK(var(y) < var(x));
}

TEST_CASE("butterworth design matches the closed-form magnitude") {
  for (std::size_t order : {2u, 4u, 6u}) {
    dsp::FilterSpec spec;
    spec.highpass_order = order;
    const auto sections = dsp::design_butterworth_highpass(spec);
    CHECK(sections.size() == order / 2);
    for (double f : {0.1, 0.5, 1.0, 1.5, 3.0, 5.0, 10.0, 20.0, 24.0}) {
      CHECK(dsp::cascade_magnitude(sections, f, spec.sample_rate) ==
            doctest::Approx(butterworth_hp_gain(f, spec.highpass_cutoff, spec.sample_rate,
                                                static_cast<int>(order)))
                .epsilon(1e-9));
    }
    CHECK(dsp::cascade_magnitude(sections, 1.5, 50.0) == doctest::Approx(std::sqrt(0.5)));
  }
}

TEST_CASE("default filter pass and stop bands") {
  const dsp::FilterSpec spec;
  CHECK(std::abs(filtered_amplitude(5.0, spec) - 1.0) <= 0.05);
  CHECK(filtered_amplitude(0.5, spec) < 0.2);
  CHECK(std::abs(butterworth_hp_gain(5.0, 1.5, 50.0, 2) - 1.0) <= 0.05);
  CHECK(butterworth_hp_gain(0.5, 1.5, 50.0, 2) < 0.2);
}

TEST_CASE("constant input decays without start-up transient") {
  const dsp::FilterSpec spec;
  const Series x(200, 9.81);
  const auto y = dsp::butterworth_highpass(x, spec);
  for (std::size_t i = 50; i < y.size(); ++i) CHECK(std::abs(y[i]) < 1e-3);
  const auto p = dsp::preprocess(x, spec);
  for (std::size_t i = 50; i < p.size(); ++i) CHECK(std::abs(p[i]) < 1e-3);
}

TEST_CASE("filtering is linear") {
  const dsp::FilterSpec spec;
  std::mt19937_64 rng(8);
  const auto a = oracle::random_series(rng, 300);
  const auto b = oracle::random_series(rng, 300);
  Series mix(300);
  for (std::size_t i = 0; i < 300; ++i) mix[i] = 2.0 * a[i] - 0.5 * b[i];
  const auto ya = dsp::preprocess(a, spec), yb = dsp::preprocess(b, spec), ym = dsp::preprocess(mix, spec);
  for (std::size_t i = 0; i < 300; ++i) CHECK(std::abs(ym[i] - (2.0 * ya[i] - 0.5 * yb[i])) < 1e-9);
}

TEST_CASE("filter errors") {
  dsp::FilterSpec spec;
  spec.highpass_cutoff = 25.0;
  CHECK_THROWS_AS(dsp::design_butterworth_highpass(spec), mcc::Error);
  spec.highpass_cutoff = 0.0;
  CHECK_THROWS_AS(dsp::design_butterworth_highpass(spec), mcc::Error);
  spec = {};
  spec.highpass_order = 3;
  try {
    dsp::design_butterworth_highpass(spec);
    FAIL("expected domain error");
  } catch (const mcc::Error& e) {
    CHECK(e.kind() == mcc::ErrorKind::domain);
  }
  CHECK_THROWS_AS(dsp::butterworth_highpass(Series{1.0}, dsp::FilterSpec{}), mcc::Error);
}

TEST_CASE("centred slices") {
  const auto x = ramp_channels(1500);
  const auto spec = dsp::WindowSpec::single_sample();
  CHECK(dsp::window_samples(spec, 50.0) == 20);
  const auto s = dsp::slice_centered(x, 10.0, spec, 50.0);
  REQUIRE(s.size() == 3);
  CHECK(s[0].size() == 20);
  CHECK(s[0].front() == 490.0);
  CHECK(s[0].back() == 509.0);
  CHECK(s[2][0] == 245.0);
  CHECK(dsp::centered_start(0.2, spec, 50.0, 1500) == 0);
  try {
    dsp::slice_centered(x, 0.1, spec, 50.0);
    FAIL("expected bounds error");
  } catch (const mcc::Error& e) {
    CHECK(e.kind() == mcc::ErrorKind::bounds);
  }
  CHECK_THROWS_AS(dsp::slice_centered(x, 29.9, spec, 50.0), mcc::Error);
}

TEST_CASE("sliding windows") {
  CHECK(dsp::window_starts(1500, 20, 5).size() == 297);
  CHECK(dsp::window_starts(1500, 20, 1).size() == 1481);
  CHECK(dsp::window_starts(15, 20, 5).empty());
  CHECK(dsp::window_starts(20, 20, 5) == std::vector<std::size_t>{0});

  const auto x = ramp_channels(1500);
  const dsp::WindowSpec spec;
  CHECK(dsp::stride_samples(spec, 50.0) == 5);
  CHECK(dsp::stride_samples(dsp::WindowSpec::single_sample(), 50.0) == 1);
  const auto windows = dsp::slide_windows(x, spec, 50.0);
  REQUIRE(windows.size() == 297);
  for (const auto& w : windows) {
    REQUIRE(w.channels.size() == 3);
    for (std::size_t a = 0; a < 3; ++a) {
      REQUIRE(w.channels[a].size() == 20);
      for (std::size_t i = 0; i < 20; ++i) CHECK(w.channels[a][i] == x[a][w.start + i]);
    }
  }
  CHECK(dsp::slide_windows(ramp_channels(15), spec, 50.0).empty());

  // Reordering channels reorders the windows' channels and nothing else.
  dsp::Channels swapped = {x[2], x[0], x[1]};
  const auto sw = dsp::slide_windows(swapped, spec, 50.0);
  for (std::size_t k = 0; k < windows.size(); k += 37) {
    CHECK(sw[k].start == windows[k].start);
    CHECK(sw[k].channels[0] == windows[k].channels[2]);
    CHECK(sw[k].channels[1] == windows[k].channels[0]);
  }
}

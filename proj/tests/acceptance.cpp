// Acceptance gate: one line per criterion, nonzero exit if any fails.
// MCC_TRACE_PATH (one or more UCR files joined by ':') enables criterion 2.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mcc/baselines.hpp"
#include "mcc/core.hpp"
#include "mcc/coughdet.hpp"
#include "mcc/datasets.hpp"
#include "mcc/dsp.hpp"
#include "mcc/error.hpp"
#include "mcc/evalbench.hpp"
#include "mcc/model_io.hpp"
#include "mcc/tsdist.hpp"
#include "oracles.hpp"

using mcc::Label;
using mcc::Series;
namespace data = mcc::data;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double test_accuracy(const mcc::MccModel& model, const data::LabeledDataset& test) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < test.size(); ++i)
    ok += mcc::predict(model, test.samples[i]).label == test.labels[i] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(test.size());
}

struct SnowmanRun {
  double accuracy;
  std::size_t templates;
  double seconds;
};

SnowmanRun snowman_run(std::uint64_t seed, double stop, data::SnowmanComponent positive) {
  const auto t0 = Clock::now();
  const auto ds = data::gen_snowman(1334, positive, seed);
  const auto [train, test] = data::split_train_test(ds, 0.7, seed);
  mcc::TrainConfig cfg;
  cfg.metric = mcc::Metric::euclidean();
  cfg.stop = {mcc::StopMode::train_accuracy, stop};
  cfg.rng_seed = seed;
  const auto model = mcc::train(train.of(Label::positive), train.of(Label::negative), cfg);
  return {test_accuracy(model, test), model.size(), seconds_since(t0)};
}

Outcome criterion_snowman() {
  struct Target {
    double stop, min_acc;
    std::size_t max_k;
  };
  std::ostringstream detail;
  bool ok = true;
  for (const Target t : {Target{0.90, 0.93, 5}, Target{0.95, 0.97, 25}}) {
    int good = 0;
    double slowest = 0.0, acc_sum = 0.0, head_acc_sum = 0.0;
    std::size_t k_sum = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto r = snowman_run(seed, t.stop, data::SnowmanComponent::body);
      good += r.accuracy >= t.min_acc && r.templates <= t.max_k ? 1 : 0;
      slowest = std::max(slowest, r.seconds);
      acc_sum += r.accuracy;
      k_sum += r.templates;
      head_acc_sum += snowman_run(seed, t.stop, data::SnowmanComponent::head).accuracy;
    }
    ok = ok && good >= 8 && slowest < 60.0;
    detail << "stop " << t.stop << ": " << good << "/10 seeds meet acc>=" << t.min_acc
           << " K<=" << t.max_k << " (mean acc " << fmt("%.4f", acc_sum / 10) << ", mean K "
           << fmt("%.1f", k_sum / 10.0) << ", slowest " << fmt("%.2fs", slowest)
           << "; head-positive mean acc " << fmt("%.4f", head_acc_sum / 10) << "). ";
  }
  return {ok ? Status::pass : Status::fail, detail.str()};
}

std::vector<std::string> split_paths(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, ':');)
    if (!part.empty()) out.push_back(part);
  return out;
}

Outcome criterion_trace() {
  const char* env = std::getenv("MCC_TRACE_PATH");
  if (env == nullptr || *env == '\0')
    return {Status::skip, "MCC_TRACE_PATH not set; no Trace file available"};
  const auto t0 = Clock::now();
  const data::ClassMapping mapping{{"2"}, {"3"}};
  data::LabeledDataset all;
  for (const auto& path : split_paths(env)) {
    const auto part = data::load_ucr(path, mapping);
    all.samples.insert(all.samples.end(), part.samples.begin(), part.samples.end());
    all.labels.insert(all.labels.end(), part.labels.begin(), part.labels.end());
  }
  const auto [train, test] = data::split_train_test(all, 0.7, 7);
  mcc::TrainConfig cfg;
  cfg.metric = mcc::Metric::dynamic_time_warping();
  cfg.stop = {mcc::StopMode::train_accuracy, 1.0};
  const auto model = mcc::train(train.of(Label::positive), train.of(Label::negative), cfg);
  const double acc = test_accuracy(model, test);
  const double secs = seconds_since(t0);
  const bool ok = acc == 1.0 && model.size() <= 4 && secs < 300.0;
  return {ok ? Status::pass : Status::fail,
          "test acc " + fmt("%.4f", acc) + ", K " + std::to_string(model.size()) + ", " +
              fmt("%.1fs", secs)};
}

Outcome criterion_speed_size() {
  const auto ds = data::gen_trace_like(100, 275, 7);
  const auto [train, test] = data::split_train_test(ds, 0.7, 7);
  const auto dtw = mcc::Metric::dynamic_time_warping();
  mcc::TrainConfig cfg;
  cfg.metric = dtw;
  cfg.stop = {mcc::StopMode::train_accuracy, 1.0};
  const auto model = mcc::train(train.of(Label::positive), train.of(Label::negative), cfg);
  const mcc::baselines::InstanceStore store(dtw, train.samples, train.labels);
  const mcc::bench::MccClassifier mcc_clf(model);
  const mcc::bench::KnnClassifier knn(store, 1);
  const auto m = mcc::bench::benchmark_inference(mcc_clf, test, {3, 0});
  const auto b = mcc::bench::benchmark_inference(knn, test, {1, 0});
  const double speed = b.time_per_sample_s / m.time_per_sample_s;
  const double size = static_cast<double>(b.model_bytes) / static_cast<double>(m.model_bytes);
  const bool ok = speed >= 10.0 && size >= 10.0;
  return {ok ? Status::pass : Status::fail,
          "surrogate 200x275: speed ratio " + fmt("%.1fx", speed) + ", size ratio " +
              fmt("%.1fx", size) + " (K " + std::to_string(model.size()) + ", mcc acc " +
              fmt("%.3f", m.accuracy) + ", 1nn acc " + fmt("%.3f", b.accuracy) + ")"};
}

Outcome criterion_dtw_oracle() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> len(1, 5);
  int mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    const auto a = oracle::random_series(rng, len(rng));
    const auto b = oracle::random_series(rng, len(rng));
    const double expected = std::sqrt(oracle::dtw_cost_enumerated(a, b));
    mismatches += mcc::dtw_distance(a, b) == expected ? 0 : 1;
  }
  return {mismatches == 0 ? Status::pass : Status::fail,
          std::to_string(500 - mismatches) + "/500 pairs exactly equal"};
}

Outcome criterion_cost() {
  std::mt19937_64 rng(5);
  int wrong = 0;
  for (int i = 0; i < 1000; ++i) {
    // Small integer distances make ties and empty radii common.
    std::uniform_int_distribution<int> count(1, 8), value(0, 6);
    std::vector<double> pos(count(rng)), neg(count(rng) - 1);
    for (auto& d : pos) d = value(rng);
    for (auto& d : neg) d = i % 2 ? value(rng) : value(rng) + 0.37 * value(rng);
    const double max_pos = *std::max_element(pos.begin(), pos.end());
    double min_in_radius = std::numeric_limits<double>::infinity();
    for (double d : neg)
      if (d <= max_pos) min_in_radius = std::min(min_in_radius, d);
    const bool separated = max_pos <= min_in_radius;
    wrong += (mcc::cluster_cost(pos, neg) == 0.0) == separated ? 0 : 1;
  }

  int zero_cost_runs = 0, implication_broken = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Series> p, q;
    for (int k = 0; k < 30; ++k) {
      const double cx = (k % 3) * 6.0;
      p.push_back({cx + n(g), n(g)});
      q.push_back({3.0 + (k % 2) * 6.0 + n(g), 4.0 + n(g)});
    }
    mcc::TrainConfig cfg;
    cfg.stop = {mcc::StopMode::cost_threshold, 0.0};
    cfg.rng_seed = seed;
    const auto model = mcc::train(p, q, cfg);
    if (model.metadata().final_cost != 0.0) continue;
    ++zero_cost_runs;
    for (const auto& s : p) implication_broken += mcc::predict(model, s).label == Label::positive ? 0 : 1;
  }
  const bool ok = wrong == 0 && implication_broken == 0 && zero_cost_runs > 0;
  return {ok ? Status::pass : Status::fail,
          std::to_string(1000 - wrong) + "/1000 distance sets agree; " +
              std::to_string(zero_cost_runs) + " zero-cost trainings, " +
              std::to_string(implication_broken) + " training positives rejected"};
}

Outcome criterion_dba() {
  std::mt19937_64 rng(6);
  int violations = 0, short_runs = 0;
  for (int c = 0; c < 100; ++c) {
    std::vector<Series> members;
    const std::size_t n = 2 + c % 7;
    for (std::size_t k = 0; k < n; ++k) members.push_back(oracle::random_series(rng, 3 + (c + k) % 6));
    mcc::DbaOptions opts;
    opts.iterations = 10;
    opts.tolerance = -1.0;  // never stop early, even at a fixed point
    const auto r = mcc::dba(members, members[mcc::dtw_medoid(members)], opts);
    short_runs += r.wgss.size() == 11 ? 0 : 1;
    for (std::size_t t = 1; t < r.wgss.size(); ++t) violations += r.wgss[t] <= r.wgss[t - 1] ? 0 : 1;
  }
  return {violations == 0 && short_runs == 0 ? Status::pass : Status::fail,
          std::to_string(violations) + " increases over 100 clusters x 10 iterations (" +
              std::to_string(short_runs) + " runs cut short)"};
}

Outcome criterion_threshold() {
  std::mt19937_64 rng(7);
  int worse = 0;
  for (int i = 0; i < 1000; ++i) {
    std::uniform_int_distribution<int> count(1, 12);
    std::vector<double> pos(count(rng)), neg(count(rng) - 1);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::uniform_int_distribution<int> grid(0, 5);
    for (auto* v : {&pos, &neg})
      for (auto& d : *v) d = i % 3 == 0 ? static_cast<double>(grid(rng)) : u(rng);
    const auto choice = mcc::select_threshold(pos, neg);
    const auto actual = oracle::threshold_errors(pos, neg, choice.threshold);
    worse += actual == oracle::min_threshold_errors(pos, neg) && actual == choice.errors ? 0 : 1;
  }
  return {worse == 0 ? Status::pass : Status::fail,
          std::to_string(1000 - worse) + "/1000 cases reach the brute-force minimum"};
}

Outcome criterion_pipeline() {
  const auto t0 = Clock::now();
  const auto sessions = data::gen_synthetic_sessions(4, 8, 7);
  const mcc::cough::PipelineConfig cfg;
  const std::vector<double> adjusts = {-30, -15, 0, 15, 30};
  const auto sweep = mcc::cough::threshold_sweep(sessions, cfg, adjusts);
  const double secs = seconds_since(t0);

  bool monotone = true;
  for (std::size_t k = 1; k < sweep.reports.size(); ++k) {
    const auto& a = sweep.reports[k - 1];
    const auto& b = sweep.reports[k];
    monotone = monotone && *b.sens_seated >= *a.sens_seated && *b.sens_all >= *a.sens_all &&
               *b.spec <= *a.spec;
  }

  // Each fold's positives must be exactly the seated coughs of the other subjects.
  bool leakage_free = sweep.folds.size() == 4;
  for (const auto& fold : sweep.folds) {
    std::size_t expected = 0;
    for (const auto& s : sessions)
      if (s.subject_id != fold.subject && s.type == data::SessionType::cough_seated)
        expected += s.cough_centers.size();
    leakage_free = leakage_free && fold.positives == expected;
  }

  const auto& at0 = sweep.reports[2];
  const bool quality = *at0.sens_seated >= 0.9 && *at0.spec >= 0.9;
  const bool ok = secs < 300.0 && monotone && leakage_free && quality;
  std::ostringstream d;
  d << "LOSO 4 subjects in " << fmt("%.1fs", secs) << "; monotone " << (monotone ? "yes" : "no")
    << "; leakage-free " << (leakage_free ? "yes" : "no") << "; adjust 0: sens_seated "
    << fmt("%.3f", *at0.sens_seated) << ", sens_all " << fmt("%.3f", *at0.sens_all) << ", spec "
    << fmt("%.3f", *at0.spec);
  return {ok ? Status::pass : Status::fail, d.str()};
}

Outcome criterion_determinism() {
  const auto ds = data::gen_snowman(1334, data::SnowmanComponent::body, 3);
  const auto [train, test] = data::split_train_test(ds, 0.7, 3);
  std::set<std::string> models;
  for (unsigned threads : {1u, 4u, 1u}) {
    mcc::TrainConfig cfg;
    cfg.stop = {mcc::StopMode::train_accuracy, 0.9};
    cfg.threads = threads;
    models.insert(mcc::model_to_json(mcc::train(train.of(Label::positive), train.of(Label::negative), cfg)));
  }

  const auto sessions = data::gen_synthetic_sessions(2, 5, 9);
  std::set<std::string> sweeps;
  for (unsigned threads : {1u, 4u, 1u}) {
    mcc::cough::PipelineConfig cfg;
    cfg.instances.negative_count = 150;
    cfg.train.threads = threads;
    const std::vector<double> adjusts = {-5, 0, 5};
    sweeps.insert(mcc::cough::sweep_to_json(mcc::cough::threshold_sweep(sessions, cfg, adjusts)));
  }
  const bool ok = models.size() == 1 && sweeps.size() == 1;
  return {ok ? Status::pass : Status::fail,
          "model JSON variants " + std::to_string(models.size()) + ", sweep JSON variants " +
              std::to_string(sweeps.size()) + " across threads 1/4/1"};
}

double tone_amplitude(double f, const mcc::dsp::FilterSpec& spec) {
  const std::size_t n = static_cast<std::size_t>(spec.sample_rate * 30);
  Series x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2 * std::numbers::pi * f * i / spec.sample_rate);
  const auto y = mcc::dsp::butterworth_highpass(x, spec);
  double peak = 0.0;
  for (std::size_t i = n - static_cast<std::size_t>(spec.sample_rate * 4); i < n; ++i)
    peak = std::max(peak, std::abs(y[i]));
  return peak;
}

Outcome criterion_filter() {
  const mcc::dsp::FilterSpec spec;  // 50 Hz, order 2, 1.5 Hz
  const auto sections = mcc::dsp::design_butterworth_highpass(spec);
  const double lo = tone_amplitude(0.5, spec), hi = tone_amplitude(5.0, spec);
  const double h_lo = mcc::dsp::cascade_magnitude(sections, 0.5, spec.sample_rate);
  const double h_hi = mcc::dsp::cascade_magnitude(sections, 5.0, spec.sample_rate);
  const auto closed = [&](double f) {
    const double r = std::tan(std::numbers::pi * f / spec.sample_rate) /
                     std::tan(std::numbers::pi * spec.highpass_cutoff / spec.sample_rate);
    return r * r / std::sqrt(1 + r * r * r * r);
  };
  const bool matched = std::abs(lo - h_lo) < 0.01 && std::abs(hi - h_hi) < 0.01 &&
                       std::abs(h_lo - closed(0.5)) < 1e-9 && std::abs(h_hi - closed(5.0)) < 1e-9;
  const bool ok = lo < 0.2 && std::abs(hi - 1.0) <= 0.05 && matched;
  return {ok ? Status::pass : Status::fail,
          "0.5 Hz -> " + fmt("%.4f", lo) + " (|H| " + fmt("%.4f", h_lo) + "), 5 Hz -> " +
              fmt("%.4f", hi) + " (|H| " + fmt("%.4f", h_hi) + ")"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"snowman reproduction", criterion_snowman},
      {"trace check", criterion_trace},
      {"speed and size vs 1nn-dtw", criterion_speed_size},
      {"dtw oracle equivalence", criterion_dtw_oracle},
      {"cost function properties", criterion_cost},
      {"dba monotonicity", criterion_dba},
      {"threshold selection oracle", criterion_threshold},
      {"pipeline desk-scale run", criterion_pipeline},
      {"determinism", criterion_determinism},
      {"filter checks", criterion_filter},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    failures += o.status == Status::fail ? 1 : 0;
    std::printf("[%s] criterion %zu (%s): %s [%.1fs]\n", tag, i + 1, criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d criterion failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}

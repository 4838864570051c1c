#include "mcc.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "mcc/baselines.hpp"
#include "mcc/coughdet.hpp"
#include "mcc/datasets.hpp"
#include "mcc/error.hpp"
#include "mcc/evalbench.hpp"
#include "mcc/model_io.hpp"
#include "mcc/parallel.hpp"

struct mcc_dataset {
  mcc::data::LabeledDataset ds;
};

struct mcc_model {
  mcc::MccModel model;
};

struct mcc_sessions {
  std::vector<mcc::data::Session> sessions;
};

namespace {

thread_local std::string g_last_error;

mcc_status status_for(mcc::ErrorKind kind) {
  return static_cast<mcc_status>(static_cast<int>(kind) + 1);
}

template <typename Fn>
mcc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MCC_OK;
  } catch (const mcc::ParseError& e) {
    g_last_error = e.what();
    return MCC_ERR_PARSE;
  } catch (const mcc::Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MCC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MCC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return MCC_ERR_INTERNAL;
  }
}

template <typename... Ptrs>
bool all_nonnull(const Ptrs*... ptrs) {
  return ((ptrs != nullptr) && ...);
}

#define MCC_REQUIRE(...)                \
  do {                                  \
    if (!all_nonnull(__VA_ARGS__)) {    \
      g_last_error = "null argument";   \
      return MCC_ERR_ARGUMENT;          \
    }                                   \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

std::set<std::string> class_list(const char* text) {
  std::set<std::string> out;
  if (!text) return out;
  std::string current;
  for (const char* p = text;; ++p) {
    if (*p == ',' || *p == '\0') {
      if (!current.empty()) out.insert(mcc::data::normalize_label(current));
      current.clear();
      if (*p == '\0') break;
    } else {
      current += *p;
    }
  }
  return out;
}

mcc::Metric metric_from(int metric, long band) {
  if (metric == MCC_METRIC_EUCLIDEAN) return mcc::Metric::euclidean();
  if (metric != MCC_METRIC_DTW) mcc::fail(mcc::ErrorKind::config, "unknown metric code");
  mcc::DtwParams params;
  if (band >= 0) params.band_radius = static_cast<std::size_t>(band);
  return mcc::Metric::dynamic_time_warping(params);
}

mcc::TrainConfig train_config_from(const mcc_train_config& c) {
  mcc::TrainConfig out;
  out.metric = metric_from(c.metric, c.band_radius);
  if (c.stop_mode == MCC_STOP_ACCURACY) {
    out.stop.mode = mcc::StopMode::train_accuracy;
  } else if (c.stop_mode == MCC_STOP_COST) {
    out.stop.mode = mcc::StopMode::cost_threshold;
  } else {
    mcc::fail(mcc::ErrorKind::config, "unknown stop mode");
  }
  out.stop.value = c.stop_value;
  out.max_clusters = c.max_clusters;
  out.rng_seed = c.seed;
  out.clustering_max_iters = c.clustering_max_iters;
  out.restarts_per_split = c.restarts_per_split;
  out.dba_iterations = c.dba_iterations;
  out.threads = c.threads == 0 ? 1 : c.threads;
  return out;
}

mcc::cough::PipelineConfig pipeline_config_from(const mcc_pipeline_config& c) {
  mcc::cough::PipelineConfig out;
  out.train = train_config_from(c.train);
  out.filter.smoothing_window = c.smoothing_window;
  out.filter.highpass_cutoff = c.highpass_cutoff;
  out.filter.highpass_order = c.highpass_order;
  out.preprocess = c.preprocess != 0;
  out.window_len = c.window_len;
  out.instances.positive_window = mcc::dsp::WindowSpec::single_sample(c.window_len);
  out.instances.negative_window = {c.window_len, c.negative_stride};
  out.instances.negative_count = c.negative_count;
  out.seed = c.seed;
  return out;
}

}  // namespace

extern "C" {

const char* mcc_last_error(void) { return g_last_error.c_str(); }

const char* mcc_status_name(mcc_status status) {
  switch (status) {
    case MCC_OK: return "ok";
    case MCC_ERR_ARGUMENT: return "argument";
    default: break;
  }
  const int k = static_cast<int>(status) - 1;
  if (k < 0 || k > static_cast<int>(mcc::ErrorKind::internal)) return "unknown";
  return mcc::to_string(static_cast<mcc::ErrorKind>(k));
}

void mcc_string_free(char* s) { std::free(s); }

mcc_status mcc_euclidean_distance(const double* a, size_t na, const double* b, size_t nb,
                                  double* out) {
  MCC_REQUIRE(a, b, out);
  return guarded([&] { *out = mcc::euclidean_distance({a, na}, {b, nb}); });
}

mcc_status mcc_dtw_distance(const double* a, size_t na, const double* b, size_t nb,
                            long band_radius, double* out) {
  MCC_REQUIRE(a, b, out);
  return guarded([&] {
    mcc::DtwParams p;
    if (band_radius >= 0) p.band_radius = static_cast<std::size_t>(band_radius);
    *out = mcc::dtw_distance({a, na}, {b, nb}, p);
  });
}

mcc_status mcc_dataset_gen_snowman(size_t n, int head_positive, uint64_t seed, mcc_dataset** out) {
  MCC_REQUIRE(out);
  return guarded([&] {
    const auto component =
        head_positive ? mcc::data::SnowmanComponent::head : mcc::data::SnowmanComponent::body;
    *out = new mcc_dataset{mcc::data::gen_snowman(n, component, seed)};
  });
}

mcc_status mcc_dataset_gen_trace_like(size_t per_class, size_t length, uint64_t seed,
                                      mcc_dataset** out) {
  MCC_REQUIRE(out);
  return guarded([&] { *out = new mcc_dataset{mcc::data::gen_trace_like(per_class, length, seed)}; });
}

mcc_status mcc_dataset_load_ucr(const char* path, const char* positive_classes,
                                const char* negative_classes, mcc_dataset** out) {
  MCC_REQUIRE(path, positive_classes, negative_classes, out);
  return guarded([&] {
    mcc::data::ClassMapping mapping{class_list(positive_classes), class_list(negative_classes)};
    *out = new mcc_dataset{mcc::data::load_ucr(path, mapping)};
  });
}

mcc_status mcc_dataset_save_ucr(const mcc_dataset* ds, const char* path) {
  MCC_REQUIRE(ds, path);
  return guarded([&] { mcc::data::save_ucr(path, ds->ds); });
}

mcc_status mcc_dataset_split(const mcc_dataset* ds, double train_fraction, uint64_t seed,
                             mcc_dataset** train, mcc_dataset** test) {
  MCC_REQUIRE(ds, train, test);
  return guarded([&] {
    auto [a, b] = mcc::data::split_train_test(ds->ds, train_fraction, seed);
    auto* ta = new mcc_dataset{std::move(a)};
    try {
      *test = new mcc_dataset{std::move(b)};
    } catch (...) {
      delete ta;
      throw;
    }
    *train = ta;
  });
}

size_t mcc_dataset_size(const mcc_dataset* ds) { return ds ? ds->ds.size() : 0; }

size_t mcc_dataset_count(const mcc_dataset* ds, int label) {
  if (!ds) return 0;
  return ds->ds.count(label ? mcc::Label::positive : mcc::Label::negative);
}

mcc_status mcc_dataset_labels(const mcc_dataset* ds, int* labels_out) {
  MCC_REQUIRE(ds, labels_out);
  for (std::size_t i = 0; i < ds->ds.size(); ++i) {
    labels_out[i] = ds->ds.labels[i] == mcc::Label::positive ? 1 : 0;
  }
  return MCC_OK;
}

void mcc_dataset_free(mcc_dataset* ds) { delete ds; }

void mcc_train_config_init(mcc_train_config* config) {
  if (!config) return;
  const mcc::TrainConfig d;
  config->metric = MCC_METRIC_EUCLIDEAN;
  config->band_radius = -1;
  config->stop_mode = MCC_STOP_ACCURACY;
  config->stop_value = d.stop.value;
  config->max_clusters = d.max_clusters;
  config->seed = d.rng_seed;
  config->clustering_max_iters = d.clustering_max_iters;
  config->restarts_per_split = d.restarts_per_split;
  config->dba_iterations = d.dba_iterations;
  config->threads = d.threads;
}

mcc_status mcc_train(const mcc_dataset* ds, const mcc_train_config* config, mcc_model** out) {
  MCC_REQUIRE(ds, config, out);
  return guarded([&] {
    const auto cfg = train_config_from(*config);
    const auto pos = ds->ds.of(mcc::Label::positive);
    const auto neg = ds->ds.of(mcc::Label::negative);
    *out = new mcc_model{mcc::train(pos, neg, cfg)};
  });
}

mcc_status mcc_model_predict(const mcc_model* model, const double* x, size_t n, double adjust,
                             int* label, size_t* nearest, double* margin) {
  MCC_REQUIRE(model, x);
  return guarded([&] {
    const auto p = mcc::predict(model->model, {x, n}, adjust);
    if (label) *label = p.label == mcc::Label::positive ? 1 : 0;
    if (nearest) *nearest = p.nearest_template;
    if (margin) *margin = p.margin;
  });
}

mcc_status mcc_model_predict_dataset(const mcc_model* model, const mcc_dataset* ds, double adjust,
                                     unsigned threads, int* labels, size_t* nearest,
                                     double* margins) {
  MCC_REQUIRE(model, ds, labels);
  return guarded([&] {
    mcc::parallel_for(ds->ds.size(), threads, [&](std::size_t i) {
      const auto p = mcc::predict(model->model, ds->ds.samples[i], adjust);
      labels[i] = p.label == mcc::Label::positive ? 1 : 0;
      if (nearest) nearest[i] = p.nearest_template;
      if (margins) margins[i] = p.margin;
    });
  });
}

size_t mcc_model_template_count(const mcc_model* model) { return model ? model->model.size() : 0; }

mcc_status mcc_model_to_json(const mcc_model* model, char** json_out) {
  MCC_REQUIRE(model, json_out);
  return guarded([&] { *json_out = dup_string(mcc::model_to_json(model->model)); });
}

mcc_status mcc_model_binary_size(const mcc_model* model, size_t* out) {
  MCC_REQUIRE(model, out);
  return guarded([&] { *out = mcc::model_to_binary(model->model).size(); });
}

mcc_status mcc_model_save(const mcc_model* model, const char* path, int format) {
  MCC_REQUIRE(model, path);
  return guarded([&] {
    mcc::ModelFormat f = mcc::format_for_path(path);
    if (format == 0) f = mcc::ModelFormat::json;
    if (format == 1) f = mcc::ModelFormat::binary;
    mcc::save_model(model->model, path, f);
  });
}

mcc_status mcc_model_load(const char* path, mcc_model** out) {
  MCC_REQUIRE(path, out);
  return guarded([&] { *out = new mcc_model{mcc::load_model(path)}; });
}

void mcc_model_free(mcc_model* model) { delete model; }

void mcc_bench_options_init(mcc_bench_options* options) {
  if (!options) return;
  options->repeats = 10;
  options->throughput_threads = 0;
  options->knn_k = 1;
  options->nearest_centroid = 1;
  options->adjust = 0.0;
  options->dba_iterations = 10;
}

mcc_status mcc_bench(const mcc_model* model, const mcc_dataset* train, const mcc_dataset* test,
                     const mcc_bench_options* options, char** csv_out) {
  MCC_REQUIRE(model, train, test, options, csv_out);
  return guarded([&] {
    namespace bench = mcc::bench;
    const bench::BenchOptions opts{options->repeats, options->throughput_threads};
    std::vector<bench::BenchResult> rows;

    bench::MccClassifier mcc_clf(model->model, options->adjust);
    rows.push_back(bench::benchmark_inference(mcc_clf, test->ds, opts));

    const mcc::baselines::InstanceStore store(model->model.metric(), train->ds.samples,
                                              train->ds.labels);
    bench::KnnClassifier knn(store, options->knn_k);
    rows.push_back(bench::benchmark_inference(knn, test->ds, opts));

    if (options->nearest_centroid) {
      const auto nc = mcc::baselines::nearest_centroid_train(
          train->ds.of(mcc::Label::positive), train->ds.of(mcc::Label::negative),
          model->model.metric(), options->dba_iterations);
      bench::NearestCentroidClassifier nc_clf(nc);
      rows.push_back(bench::benchmark_inference(nc_clf, test->ds, opts));
    }
    *csv_out = dup_string(bench::bench_csv(rows));
  });
}

mcc_status mcc_sessions_gen(size_t n_subjects, size_t coughs_per_session, uint64_t seed,
                            double burst_amplitude, mcc_sessions** out) {
  MCC_REQUIRE(out);
  return guarded([&] {
    mcc::data::SyntheticSessionOptions opts;
    opts.burst_amplitude = burst_amplitude;
    *out = new mcc_sessions{
        mcc::data::gen_synthetic_sessions(n_subjects, coughs_per_session, seed, opts)};
  });
}

mcc_status mcc_sessions_load(const char* manifest_path, mcc_sessions** out) {
  MCC_REQUIRE(manifest_path, out);
  return guarded([&] { *out = new mcc_sessions{mcc::data::load_sessions(manifest_path)}; });
}

mcc_status mcc_sessions_save(const mcc_sessions* sessions, const char* dir) {
  MCC_REQUIRE(sessions, dir);
  return guarded([&] { mcc::data::save_sessions(dir, sessions->sessions); });
}

size_t mcc_sessions_count(const mcc_sessions* sessions) {
  return sessions ? sessions->sessions.size() : 0;
}

void mcc_sessions_free(mcc_sessions* sessions) { delete sessions; }

void mcc_pipeline_config_init(mcc_pipeline_config* config) {
  if (!config) return;
  const mcc::cough::PipelineConfig d;
  mcc_train_config_init(&config->train);
  config->train.metric = MCC_METRIC_DTW;
  config->smoothing_window = d.filter.smoothing_window;
  config->highpass_cutoff = d.filter.highpass_cutoff;
  config->highpass_order = d.filter.highpass_order;
  config->preprocess = d.preprocess ? 1 : 0;
  config->window_len = d.window_len;
  config->negative_stride = d.instances.negative_window.stride.value_or(0.1);
  config->negative_count = d.instances.negative_count;
  config->seed = d.seed;
}

mcc_status mcc_cough_run(const mcc_sessions* sessions, const mcc_pipeline_config* config,
                         double adjust, char** report_json_out) {
  MCC_REQUIRE(sessions, config, report_json_out);
  return guarded([&] {
    const auto report =
        mcc::cough::loso_evaluate(sessions->sessions, pipeline_config_from(*config), adjust);
    *report_json_out = dup_string(mcc::cough::report_to_json(report));
  });
}

mcc_status mcc_cough_sweep(const mcc_sessions* sessions, const mcc_pipeline_config* config,
                           const double* adjusts, size_t n_adjusts, char** sweep_json_out,
                           char** roc_csv_out) {
  MCC_REQUIRE(sessions, config, adjusts);
  return guarded([&] {
    const auto sweep = mcc::cough::threshold_sweep(sessions->sessions, pipeline_config_from(*config),
                                                   {adjusts, n_adjusts});
    std::string json = mcc::cough::sweep_to_json(sweep);
    std::string csv = mcc::cough::roc_csv(sweep.roc);
    char* j = sweep_json_out ? dup_string(json) : nullptr;
    try {
      if (roc_csv_out) *roc_csv_out = dup_string(csv);
    } catch (...) {
      std::free(j);
      throw;
    }
    if (sweep_json_out) *sweep_json_out = j;
  });
}

}  // extern "C"

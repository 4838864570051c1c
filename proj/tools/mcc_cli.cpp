// Command-line front end. Talks to the library exclusively through mcc.h.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcc.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDefaultSeed = 7;

// Flag defaults from a JSON document. Nested objects address subcommands:
// {"seed": 3, "train": {"metric": "dtw"}, "cough": {"sweep": {"negatives": 200}}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(input);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("config file: top level must be an object");
    std::vector<CLI::ConfigItem> items;
    collect(doc, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config file: unsupported value for " + key);
  }

  static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        collect(value, next, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v, key));
      } else {
        item.inputs.push_back(scalar(value, key));
      }
      out.push_back(std::move(item));
    }
  }
};

struct Failure {
  mcc_status status;
  std::string message;
};

void check(mcc_status status) {
  if (status != MCC_OK) throw Failure{status, mcc_last_error()};
}

void usage_failure(const std::string& message) { throw Failure{MCC_ERR_CONFIG, message}; }

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Dataset = std::unique_ptr<mcc_dataset, Deleter<mcc_dataset, mcc_dataset_free>>;
using Model = std::unique_ptr<mcc_model, Deleter<mcc_model, mcc_model_free>>;
using Sessions = std::unique_ptr<mcc_sessions, Deleter<mcc_sessions, mcc_sessions_free>>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  mcc_string_free(s);
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{MCC_ERR_IO, "cannot write " + tmp.string()};
    out << content;
    if (!out.flush()) throw Failure{MCC_ERR_IO, "cannot write " + tmp.string()};
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Failure{MCC_ERR_IO, "cannot rename onto " + path.string() + ": " + ec.message()};
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Common {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
};

struct TrainFlags {
  std::string metric = "euclidean";
  long band = -1;
  std::optional<double> stop_acc;
  std::optional<double> stop_cost;
  std::size_t max_clusters = 64;
  std::size_t restarts = 3;
  std::size_t cluster_iters = 20;
  std::size_t dba_iters = 10;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--metric", metric, "Distance: euclidean or dtw")
        ->check(CLI::IsMember({"euclidean", "dtw"}))
        ->capture_default_str();
    cmd->add_option("--band", band, "Sakoe-Chiba band radius for dtw (-1: none)")
        ->capture_default_str();
    auto* acc = cmd->add_option("--stop-acc", stop_acc, "Stop once training accuracy reaches this (default 0.95)");
    auto* cost = cmd->add_option("--stop-cost", stop_cost, "Stop once total discrepancy cost is at most this");
    acc->excludes(cost);
    cmd->add_option("--max-clusters", max_clusters)->capture_default_str();
    cmd->add_option("--restarts", restarts, "Restarts per split")->capture_default_str();
    cmd->add_option("--cluster-iters", cluster_iters, "Clustering iterations per split")
        ->capture_default_str();
    cmd->add_option("--dba-iters", dba_iters)->capture_default_str();
  }

  mcc_train_config to_config(const Common& common) const {
    mcc_train_config c;
    mcc_train_config_init(&c);
    c.metric = metric == "dtw" ? MCC_METRIC_DTW : MCC_METRIC_EUCLIDEAN;
    c.band_radius = band;
    if (stop_cost) {
      c.stop_mode = MCC_STOP_COST;
      c.stop_value = *stop_cost;
    } else {
      c.stop_mode = MCC_STOP_ACCURACY;
      c.stop_value = stop_acc.value_or(0.95);
    }
    c.max_clusters = max_clusters;
    c.seed = common.seed;
    c.clustering_max_iters = cluster_iters;
    c.restarts_per_split = restarts;
    c.dba_iterations = dba_iters;
    c.threads = common.threads;
    return c;
  }
};

struct DataFlags {
  std::string path;
  std::string pos = "1";
  std::string neg = "0";
  std::optional<double> train_fraction;

  void add_to(CLI::App* cmd, const char* fraction_help) {
    cmd->add_option("--data", path, "UCR-format data file")->required();
    cmd->add_option("--pos", pos, "Comma-separated labels of the positive class")->capture_default_str();
    cmd->add_option("--neg", neg, "Comma-separated labels of the negative class")->capture_default_str();
    cmd->add_option("--train-fraction", train_fraction, fraction_help);
  }

  Dataset load() const {
    mcc_dataset* ds = nullptr;
    check(mcc_dataset_load_ucr(path.c_str(), pos.c_str(), neg.c_str(), &ds));
    return Dataset(ds);
  }

  // Stratified split with `seed`; identical to the split `train` performs.
  std::pair<Dataset, Dataset> split(const Dataset& all, std::uint64_t seed) const {
    mcc_dataset* a = nullptr;
    mcc_dataset* b = nullptr;
    check(mcc_dataset_split(all.get(), *train_fraction, seed, &a, &b));
    return {Dataset(a), Dataset(b)};
  }
};

struct PipelineFlags {
  TrainFlags train;
  std::string manifest;
  std::size_t negatives = 500;
  double window = 0.4;
  double negative_stride = 0.1;
  std::size_t smoothing = 10;
  double cutoff = 1.5;
  std::size_t order = 2;
  bool no_preprocess = false;

  void add_to(CLI::App* cmd) {
    train.metric = "dtw";
    train.add_to(cmd);
    cmd->add_option("--manifest", manifest, "Session manifest (JSON)")->required();
    cmd->add_option("--negatives", negatives, "Negative windows sampled per fold")->capture_default_str();
    cmd->add_option("--window", window, "Window length in seconds")->capture_default_str();
    cmd->add_option("--negative-stride", negative_stride, "Stride of candidate negative windows (s)")
        ->capture_default_str();
    cmd->add_option("--smoothing", smoothing, "Moving-average window (samples)")->capture_default_str();
    cmd->add_option("--cutoff", cutoff, "High-pass cutoff (Hz)")->capture_default_str();
    cmd->add_option("--order", order, "High-pass order (even)")->capture_default_str();
    cmd->add_flag("--no-preprocess", no_preprocess, "Use the recorded signals as they are");
  }

  mcc_pipeline_config to_config(const Common& common) const {
    mcc_pipeline_config c;
    mcc_pipeline_config_init(&c);
    c.train = train.to_config(common);
    c.smoothing_window = smoothing;
    c.highpass_cutoff = cutoff;
    c.highpass_order = order;
    c.preprocess = no_preprocess ? 0 : 1;
    c.window_len = window;
    c.negative_stride = negative_stride;
    c.negative_count = negatives;
    c.seed = common.seed;
    return c;
  }

  Sessions load() const {
    mcc_sessions* s = nullptr;
    check(mcc_sessions_load(manifest.c_str(), &s));
    return Sessions(s);
  }
};

ordered_json model_summary(const mcc_model* model) {
  char* json = nullptr;
  check(mcc_model_to_json(model, &json));
  const auto doc = ordered_json::parse(take_string(json));
  return doc.at("metadata");
}

int run(int argc, char** argv) {
  CLI::App app{"Multi-centroid time-series classifier toolkit", "mcc"};
  app.fallthrough();
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file supplying flag defaults; explicit flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Common common;
  app.add_option("--seed", common.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", common.threads, "Worker threads (results do not depend on it)")
      ->envname("MCC_THREADS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate datasets");
  gen->require_subcommand(1);

  std::size_t snow_n = 1334;
  std::string snow_positive = "body";
  std::string snow_out;
  auto* gen_snow = gen->add_subcommand("snowman", "Two-Gaussian 2-D dataset (UCR format)");
  gen_snow->add_option("--n", snow_n)->capture_default_str();
  gen_snow->add_option("--positive", snow_positive, "Component labelled positive")
      ->check(CLI::IsMember({"body", "head"}))
      ->capture_default_str();
  gen_snow->add_option("--out", snow_out)->required();

  std::size_t trace_per_class = 100;
  std::size_t trace_length = 275;
  std::string trace_out;
  auto* gen_trace = gen->add_subcommand("trace-like", "Step-versus-pulse series (UCR format)");
  gen_trace->add_option("--per-class", trace_per_class)->capture_default_str();
  gen_trace->add_option("--length", trace_length)->capture_default_str();
  gen_trace->add_option("--out", trace_out)->required();

  std::size_t sess_subjects = 4;
  std::size_t sess_coughs = 8;
  double sess_amplitude = 10.0;
  std::string sess_out;
  auto* gen_sess = gen->add_subcommand("sessions", "Synthetic IMU sessions with a manifest");
  gen_sess->add_option("--subjects", sess_subjects)->capture_default_str();
  gen_sess->add_option("--coughs", sess_coughs, "Coughs per cough session")->capture_default_str();
  gen_sess->add_option("--burst-amplitude", sess_amplitude, "Cough peak in noise units")
      ->capture_default_str();
  gen_sess->add_option("--out", sess_out, "Output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Train a model");
  TrainFlags train_flags;
  DataFlags train_data;
  std::string train_out;
  train_flags.add_to(train);
  train_data.add_to(train, "Train on this stratified fraction only");
  train->add_option("--out", train_out, "Model path (.json or .bin)")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "Label every sample of a data file");
  DataFlags predict_data;
  std::string predict_model, predict_out;
  double predict_adjust = 0.0;
  predict_data.add_to(predict, "Predict the held-out part of this split only");
  predict->add_option("--model", predict_model)->required();
  predict->add_option("--adjust", predict_adjust, "Offset added to every threshold")->capture_default_str();
  predict->add_option("--out", predict_out, "CSV: index,label,nearest,margin")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Accuracy of a model on labelled data");
  DataFlags eval_data;
  std::string eval_model, eval_out;
  double eval_adjust = 0.0;
  eval_data.add_to(eval, "Evaluate the held-out part of this split only");
  eval->add_option("--model", eval_model)->required();
  eval->add_option("--adjust", eval_adjust)->capture_default_str();
  eval->add_option("--out", eval_out, "JSON report (stdout when omitted)");

  // bench
  auto* bench = app.add_subcommand("bench", "Inference time and model size against baselines");
  DataFlags bench_data;
  bench_data.train_fraction = 0.7;
  std::string bench_model, bench_out;
  std::size_t bench_repeats = 10;
  std::size_t bench_k = 1;
  bool bench_no_centroid = false;
  bench_data.add_to(bench, "Baselines store this fraction; timing runs on the rest");
  bench->add_option("--model", bench_model)->required();
  bench->add_option("--repeats", bench_repeats)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--k", bench_k, "Neighbours for the instance-store baseline")->capture_default_str();
  bench->add_flag("--no-centroid", bench_no_centroid, "Skip the nearest-centroid baseline");
  bench->add_option("--out", bench_out, "CSV (stdout when omitted)");

  // cough
  auto* cough = app.add_subcommand("cough", "Leave-one-subject-out cough detection");
  cough->require_subcommand(1);
  auto* cough_run = cough->add_subcommand("run", "Evaluate at one threshold adjustment");
  PipelineFlags run_flags;
  double run_adjust = 0.0;
  std::string run_out;
  run_flags.add_to(cough_run);
  cough_run->add_option("--adjust", run_adjust)->capture_default_str();
  cough_run->add_option("--out", run_out, "JSON report")->required();

  auto* cough_sweep = cough->add_subcommand("sweep", "Evaluate a grid of threshold adjustments");
  PipelineFlags sweep_flags;
  std::vector<double> sweep_adjusts = {-30, -15, 0, 15, 30};
  std::string sweep_out, sweep_report;
  sweep_flags.add_to(cough_sweep);
  cough_sweep->add_option("--adjusts", sweep_adjusts, "Comma-separated adjust values")
      ->delimiter(',')
      ->capture_default_str();
  cough_sweep->add_option("--out", sweep_out, "ROC CSV: fpr,tpr,adjust")->required();
  cough_sweep->add_option("--report", sweep_report, "JSON reports (default: --out with .json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return 1;
  } catch (const CLI::FileError& e) {
    std::cerr << "error[io]: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ConversionError& e) {
    // Raised by the config adapter for malformed JSON.
    std::cerr << "error[config]: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*gen_snow) {
    mcc_dataset* ds = nullptr;
    check(mcc_dataset_gen_snowman(snow_n, snow_positive == "head", common.seed, &ds));
    Dataset owned(ds);
    check(mcc_dataset_save_ucr(ds, snow_out.c_str()));
    std::cout << "wrote " << mcc_dataset_size(ds) << " samples to " << snow_out << "\n";
  } else if (*gen_trace) {
    mcc_dataset* ds = nullptr;
    check(mcc_dataset_gen_trace_like(trace_per_class, trace_length, common.seed, &ds));
    Dataset owned(ds);
    check(mcc_dataset_save_ucr(ds, trace_out.c_str()));
    std::cout << "wrote " << mcc_dataset_size(ds) << " series to " << trace_out << "\n";
  } else if (*gen_sess) {
    mcc_sessions* s = nullptr;
    check(mcc_sessions_gen(sess_subjects, sess_coughs, common.seed, sess_amplitude, &s));
    Sessions owned(s);
    check(mcc_sessions_save(s, sess_out.c_str()));
    std::cout << "wrote " << mcc_sessions_count(s) << " sessions to "
              << (fs::path(sess_out) / "manifest.json").string() << "\n";
  } else if (*train) {
    Dataset all = train_data.load();
    Dataset train_part;
    const mcc_dataset* used = all.get();
    if (train_data.train_fraction) {
      train_part = std::move(train_data.split(all, common.seed).first);
      used = train_part.get();
    }
    const auto config = train_flags.to_config(common);
    mcc_model* m = nullptr;
    check(mcc_train(used, &config, &m));
    Model model(m);
    check(mcc_model_save(m, train_out.c_str(), -1));
    const auto meta = model_summary(m);
    std::cout << "templates=" << mcc_model_template_count(m)
              << " train_accuracy=" << fmt(meta.at("train_accuracy").get<double>())
              << " termination=" << meta.at("termination").get<std::string>() << "\n";
  } else if (*predict || *eval) {
    const DataFlags& flags = *predict ? predict_data : eval_data;
    const std::string& model_path = *predict ? predict_model : eval_model;
    const double adjust = *predict ? predict_adjust : eval_adjust;
    mcc_model* m = nullptr;
    check(mcc_model_load(model_path.c_str(), &m));
    Model model(m);
    Dataset all = flags.load();
    Dataset test_part;
    const mcc_dataset* used = all.get();
    if (flags.train_fraction) {
      test_part = std::move(flags.split(all, common.seed).second);
      used = test_part.get();
    }
    const std::size_t n = mcc_dataset_size(used);
    std::vector<int> labels(n), truth(n);
    std::vector<std::size_t> nearest(n);
    std::vector<double> margins(n);
    check(mcc_model_predict_dataset(m, used, adjust, common.threads, labels.data(), nearest.data(),
                                    margins.data()));
    if (*predict) {
      std::string csv = "index,label,nearest,margin\n";
      for (std::size_t i = 0; i < n; ++i) {
        csv += std::to_string(i) + "," + std::to_string(labels[i]) + "," + std::to_string(nearest[i]) +
               "," + fmt(margins[i]) + "\n";
      }
      write_atomic(predict_out, csv);
    } else {
      check(mcc_dataset_labels(used, truth.data()));
      std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] && truth[i]) ++tp;
        if (labels[i] && !truth[i]) ++fp;
        if (!labels[i] && !truth[i]) ++tn;
        if (!labels[i] && truth[i]) ++fn;
      }
      if (n == 0) usage_failure("no samples to evaluate");
      ordered_json report = {
          {"accuracy", static_cast<double>(tp + tn) / static_cast<double>(n)},
          {"samples", n},
          {"templates", mcc_model_template_count(m)},
          {"adjust", adjust},
          {"confusion", {{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn}}}};
      const std::string text = report.dump(2) + "\n";
      if (eval_out.empty()) {
        std::cout << text;
      } else {
        write_atomic(eval_out, text);
      }
    }
  } else if (*bench) {
    mcc_model* m = nullptr;
    check(mcc_model_load(bench_model.c_str(), &m));
    Model model(m);
    Dataset all = bench_data.load();
    auto [train_part, test_part] = bench_data.split(all, common.seed);
    mcc_bench_options opts;
    mcc_bench_options_init(&opts);
    opts.repeats = bench_repeats;
    opts.knn_k = bench_k;
    opts.nearest_centroid = bench_no_centroid ? 0 : 1;
    opts.throughput_threads = common.threads > 1 ? common.threads : 0;
    char* csv = nullptr;
    check(mcc_bench(m, train_part.get(), test_part.get(), &opts, &csv));
    const std::string text = take_string(csv);
    if (bench_out.empty()) {
      std::cout << text;
    } else {
      write_atomic(bench_out, text);
    }
  } else if (*cough_run) {
    Sessions sessions = run_flags.load();
    const auto config = run_flags.to_config(common);
    char* json = nullptr;
    check(mcc_cough_run(sessions.get(), &config, run_adjust, &json));
    write_atomic(run_out, take_string(json));
  } else if (*cough_sweep) {
    Sessions sessions = sweep_flags.load();
    const auto config = sweep_flags.to_config(common);
    char* json = nullptr;
    char* csv = nullptr;
    check(mcc_cough_sweep(sessions.get(), &config, sweep_adjusts.data(), sweep_adjusts.size(), &json,
                          &csv));
    const std::string json_text = take_string(json);
    const std::string csv_text = take_string(csv);
    fs::path report = sweep_report;
    if (report.empty()) report = fs::path(sweep_out).replace_extension(".json");
    write_atomic(report, json_text);
    write_atomic(sweep_out, csv_text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Failure& f) {
    std::cerr << "error[" << mcc_status_name(f.status) << "]: " << f.message << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
}

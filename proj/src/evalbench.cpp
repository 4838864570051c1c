#include "mcc/evalbench.hpp"

#include <chrono>

#include "mcc/error.hpp"
#include "mcc/model_io.hpp"
#include "mcc/parallel.hpp"
#include "text_util.hpp"

namespace mcc::bench {

double accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size()) {
    fail(ErrorKind::dimension, "accuracy: label lists differ in length");
  }
  if (truth.empty()) fail(ErrorKind::domain, "accuracy: no labels");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

Label MccClassifier::predict(std::span<const double> sample) const {
  return mcc::predict(model_, sample, adjust_).label;
}

std::vector<std::uint8_t> MccClassifier::serialize() const { return model_to_binary(model_); }

KnnClassifier::KnnClassifier(const baselines::InstanceStore& store, std::size_t k)
    : store_(store), k_(k) {
  if (k == 0 || k > store.size()) fail(ErrorKind::domain, "knn: k out of range");
}

std::string KnnClassifier::name() const {
  return std::to_string(k_) + "nn-" + to_string(store_.metric().kind);
}

Label KnnClassifier::predict(std::span<const double> sample) const {
  return baselines::knn_predict(store_, sample, k_);
}

std::vector<std::uint8_t> KnnClassifier::serialize() const {
  return baselines::store_to_binary(store_);
}

Label NearestCentroidClassifier::predict(std::span<const double> sample) const {
  return baselines::nearest_centroid_predict(model_, sample);
}

std::vector<std::uint8_t> NearestCentroidClassifier::serialize() const {
  return baselines::centroids_to_binary(model_);
}

BenchResult benchmark_inference(const Classifier& classifier, const data::LabeledDataset& test,
                                const BenchOptions& options) {
  if (options.repeats < 1) fail(ErrorKind::domain, "benchmark: repeats must be >= 1");
  if (test.size() == 0) fail(ErrorKind::domain, "benchmark: empty test set");

  using clock = std::chrono::steady_clock;
  BenchResult result;
  result.name = classifier.name();
  result.repeats = options.repeats;
  result.predictions.resize(test.size());

  double total = 0.0;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    const auto start = clock::now();
    for (std::size_t i = 0; i < test.size(); ++i) {
      result.predictions[i] = classifier.predict(test.samples[i]);
    }
    total += std::chrono::duration<double>(clock::now() - start).count();
  }
  const double n = static_cast<double>(test.size());
  const double per_run = total / static_cast<double>(options.repeats);
  // A clock tick coarser than the whole run would report zero.
  result.time_per_sample_s = std::max(per_run / n, 1e-12);

  if (options.throughput_threads > 1) {
    std::vector<Label> scratch(test.size());
    const auto start = clock::now();
    parallel_for(test.size(), options.throughput_threads,
                 [&](std::size_t i) { scratch[i] = classifier.predict(test.samples[i]); });
    const double elapsed = std::chrono::duration<double>(clock::now() - start).count();
    result.throughput_time_per_sample_s = std::max(elapsed / n, 1e-12);
  }

  result.accuracy = accuracy(result.predictions, test.labels);
  result.model_bytes = classifier.serialize().size();
  return result;
}

std::string bench_csv(std::span<const BenchResult> results) {
  std::string out = "name,accuracy,time_per_sample_s,model_bytes,repeats\n";
  for (const auto& r : results) {
    out += r.name + "," + detail::format_double(r.accuracy) + "," +
           detail::format_double(r.time_per_sample_s) + "," + std::to_string(r.model_bytes) +
           "," + std::to_string(r.repeats) + "\n";
  }
  return out;
}

}  // namespace mcc::bench

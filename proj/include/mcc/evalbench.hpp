#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcc/baselines.hpp"
#include "mcc/core.hpp"
#include "mcc/datasets.hpp"

namespace mcc::bench {

/// Fraction of matching labels. Domain error when empty, dimension error on
/// a length mismatch.
double accuracy(std::span<const Label> predicted, std::span<const Label> truth);

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::string name() const = 0;
  virtual Label predict(std::span<const double> sample) const = 0;
  /// Canonical serialized form whose size is reported as the model size.
  virtual std::vector<std::uint8_t> serialize() const = 0;
};

class MccClassifier final : public Classifier {
 public:
  explicit MccClassifier(const MccModel& model, double adjust = 0.0, std::string name = "mcc")
      : model_(model), adjust_(adjust), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  Label predict(std::span<const double> sample) const override;
  std::vector<std::uint8_t> serialize() const override;

 private:
  const MccModel& model_;
  double adjust_;
  std::string name_;
};

class KnnClassifier final : public Classifier {
 public:
  KnnClassifier(const baselines::InstanceStore& store, std::size_t k);
  std::string name() const override;
  Label predict(std::span<const double> sample) const override;
  std::vector<std::uint8_t> serialize() const override;

 private:
  const baselines::InstanceStore& store_;
  std::size_t k_;
};

class NearestCentroidClassifier final : public Classifier {
 public:
  explicit NearestCentroidClassifier(const baselines::NearestCentroid& model) : model_(model) {}
  std::string name() const override { return "nearest-centroid"; }
  Label predict(std::span<const double> sample) const override;
  std::vector<std::uint8_t> serialize() const override;

 private:
  const baselines::NearestCentroid& model_;
};

struct BenchOptions {
  std::size_t repeats = 1;
  /// When > 1, an extra untimed-for-latency pass measures throughput with
  /// this many workers; reported separately.
  unsigned throughput_threads = 0;
};

struct BenchResult {
  std::string name;
  double accuracy = 0.0;
  double time_per_sample_s = 0.0;  // single worker, mean over repeats
  std::size_t model_bytes = 0;
  std::size_t repeats = 1;
  std::optional<double> throughput_time_per_sample_s;
  std::vector<Label> predictions;  // from the last timed repeat
};

/// Only the prediction loop is inside the clock.
BenchResult benchmark_inference(const Classifier& classifier, const data::LabeledDataset& test,
                                const BenchOptions& options = {});

/// Header `name,accuracy,time_per_sample_s,model_bytes,repeats`, one row per result.
std::string bench_csv(std::span<const BenchResult> results);

}  // namespace mcc::bench

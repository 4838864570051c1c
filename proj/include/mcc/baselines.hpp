#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mcc/core.hpp"

namespace mcc::baselines {

/// Labelled training instances searched exhaustively at prediction time.
class InstanceStore {
 public:
  /// Domain error when empty or when any sample is empty; dimension error
  /// when labels and samples differ in count, or when Euclidean samples
  /// differ in length.
  InstanceStore(Metric metric, std::vector<Series> samples, std::vector<Label> labels);

  const Metric& metric() const noexcept { return metric_; }
  std::span<const Series> samples() const noexcept { return samples_; }
  std::span<const Label> labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return samples_.size(); }

 private:
  Metric metric_;
  std::vector<Series> samples_;
  std::vector<Label> labels_;
};

/// Majority label of the k nearest instances. Equal distances rank the lower
/// instance index first; a split vote goes to positive.
Label knn_predict(const InstanceStore& store, std::span<const double> sample, std::size_t k);

struct NearestCentroid {
  Metric metric;
  Series positive;
  Series negative;
};

/// One centroid per class: DBA (from the DTW medoid) for dtw, mean otherwise.
NearestCentroid nearest_centroid_train(std::span<const Series> positives,
                                       std::span<const Series> negatives, const Metric& metric,
                                       std::size_t dba_iterations = 10, unsigned threads = 1);

/// Equidistant samples are positive.
Label nearest_centroid_predict(const NearestCentroid& model, std::span<const double> sample);

/// Compact form mirroring the MCC binary layout, little-endian:
///   "KNN1" | u8 version | u8 metric | i32 band radius (-1 none) | u32 count
///   | per instance: u8 label, u32 length, f32 x length
std::vector<std::uint8_t> store_to_binary(const InstanceStore& store);
std::vector<std::uint8_t> centroids_to_binary(const NearestCentroid& model);

}  // namespace mcc::baselines

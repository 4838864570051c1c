#include "mcc/baselines.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>
#include <utility>

#include "mcc/error.hpp"

namespace mcc::baselines {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::vector<std::uint8_t> encode(const Metric& metric, std::span<const Series> samples,
                                 std::span<const Label> labels) {
  std::vector<std::uint8_t> out = {'K', 'N', 'N', '1', 1};
  out.push_back(metric.kind == MetricKind::dtw ? 1 : 0);
  const auto band = metric.dtw.band_radius ? static_cast<std::int32_t>(*metric.dtw.band_radius) : -1;
  put_u32(out, static_cast<std::uint32_t>(band));
  put_u32(out, static_cast<std::uint32_t>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.push_back(static_cast<std::uint8_t>(labels[i]));
    put_u32(out, static_cast<std::uint32_t>(samples[i].size()));
    for (double v : samples[i]) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

}  // namespace

InstanceStore::InstanceStore(Metric metric, std::vector<Series> samples, std::vector<Label> labels)
    : metric_(metric), samples_(std::move(samples)), labels_(std::move(labels)) {
  if (samples_.empty()) fail(ErrorKind::domain, "instance store: no instances");
  if (samples_.size() != labels_.size()) {
    fail(ErrorKind::dimension, "instance store: sample and label counts differ");
  }
  for (const auto& s : samples_) {
    if (s.empty()) fail(ErrorKind::domain, "instance store: empty sample");
    if (metric_.kind == MetricKind::euclidean && s.size() != samples_.front().size()) {
      fail(ErrorKind::dimension, "instance store: euclidean samples differ in length");
    }
  }
}

Label knn_predict(const InstanceStore& store, std::span<const double> sample, std::size_t k) {
  if (k == 0 || k > store.size()) {
    fail(ErrorKind::domain, "knn: k must lie in [1, " + std::to_string(store.size()) + "]");
  }
  std::vector<std::pair<double, std::size_t>> ranked(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    ranked[i] = {store.metric().distance(sample, store.samples()[i]), i};
  }
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
  std::size_t positive_votes = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (store.labels()[ranked[i].second] == Label::positive) ++positive_votes;
  }
  return 2 * positive_votes >= k ? Label::positive : Label::negative;
}

NearestCentroid nearest_centroid_train(std::span<const Series> positives,
                                       std::span<const Series> negatives, const Metric& metric,
                                       std::size_t dba_iterations, unsigned threads) {
  if (positives.empty() || negatives.empty()) {
    fail(ErrorKind::domain, "nearest centroid: both classes need at least one sample");
  }
  return {metric, average_members(metric, positives, nullptr, dba_iterations, threads),
          average_members(metric, negatives, nullptr, dba_iterations, threads)};
}

Label nearest_centroid_predict(const NearestCentroid& model, std::span<const double> sample) {
  const double dp = model.metric.distance(sample, model.positive);
  const double dn = model.metric.distance(sample, model.negative);
  return dp <= dn ? Label::positive : Label::negative;
}

std::vector<std::uint8_t> store_to_binary(const InstanceStore& store) {
  return encode(store.metric(), store.samples(), store.labels());
}

std::vector<std::uint8_t> centroids_to_binary(const NearestCentroid& model) {
  const Series samples[2] = {model.positive, model.negative};
  const Label labels[2] = {Label::positive, Label::negative};
  return encode(model.metric, samples, labels);
}

}  // namespace mcc::baselines

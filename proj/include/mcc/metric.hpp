#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "mcc/tsdist.hpp"

namespace mcc {

enum class MetricKind { euclidean, dtw };

struct Metric {
  MetricKind kind = MetricKind::euclidean;
  DtwParams dtw;  // ignored for euclidean

  static Metric euclidean() { return {}; }
  static Metric dynamic_time_warping(DtwParams params = {}) {
    return {MetricKind::dtw, params};
  }

  double distance(std::span<const double> a, std::span<const double> b) const {
    return kind == MetricKind::dtw ? dtw_distance(a, b, dtw)
                                   : euclidean_distance(a, b);
  }

  friend bool operator==(const Metric&, const Metric&) = default;
};

const char* to_string(MetricKind kind) noexcept;
std::optional<MetricKind> parse_metric_kind(std::string_view name) noexcept;

/// Cluster averaging matched to the metric: DBA for dtw (warm-started at
/// `init` when given, else at the DTW medoid), coordinate-wise mean otherwise.
Series average_members(const Metric& metric, std::span<const Series> members,
                       const Series* init, std::size_t dba_iterations = 10,
                       unsigned threads = 1);

}  // namespace mcc

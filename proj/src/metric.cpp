#include "mcc/metric.hpp"

#include "mcc/error.hpp"

namespace mcc {

const char* to_string(MetricKind kind) noexcept {
  return kind == MetricKind::dtw ? "dtw" : "euclidean";
}

std::optional<MetricKind> parse_metric_kind(std::string_view name) noexcept {
  if (name == "dtw") return MetricKind::dtw;
  if (name == "euclidean") return MetricKind::euclidean;
  return std::nullopt;
}

Series average_members(const Metric& metric, std::span<const Series> members,
                       const Series* init, std::size_t dba_iterations,
                       unsigned threads) {
  if (members.empty()) fail(ErrorKind::domain, "average: empty member list");
  if (metric.kind == MetricKind::euclidean) return arithmetic_mean(members);

  DbaOptions options;
  options.iterations = dba_iterations;
  options.dtw = metric.dtw;
  options.threads = threads;
  if (init != nullptr) return dba(members, *init, options).average;
  const std::size_t medoid = dtw_medoid(members, metric.dtw, threads);
  return dba(members, members[medoid], options).average;
}

}  // namespace mcc

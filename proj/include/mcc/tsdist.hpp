#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mcc {

/// One channel of uniformly sampled values, or a fixed-length feature vector.
/// Which interpretation applies is decided by the metric using it.
using Series = std::vector<double>;

struct DtwParams {
  /// Sakoe-Chiba half-width in samples; cell (i, j) is admissible iff
  /// |i - j| <= band_radius. Empty means unconstrained.
  std::optional<std::size_t> band_radius;

  friend bool operator==(const DtwParams&, const DtwParams&) = default;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Accumulated optimal warping cost with squared-difference local cost and the
/// {match, insert, delete} step pattern. dtw_distance is its square root.
double dtw_cost(std::span<const double> a, std::span<const double> b,
                const DtwParams& params = {});

double dtw_distance(std::span<const double> a, std::span<const double> b,
                    const DtwParams& params = {});

struct WarpingPath {
  std::vector<std::pair<std::size_t, std::size_t>> steps;  // (index in a, index in b)
  double cost = 0.0;                                        // accumulated, no sqrt
};

/// Optimal path from (0, 0) to (len(a)-1, len(b)-1). Backtracking prefers the
/// diagonal step on ties, then the step that advances `a`.
WarpingPath dtw_path(std::span<const double> a, std::span<const double> b,
                     const DtwParams& params = {});

struct DbaOptions {
  std::size_t iterations = 10;
  /// Stop early once no coordinate moves by more than this.
  double tolerance = 1e-9;
  DtwParams dtw;
  unsigned threads = 1;
};

struct DbaResult {
  Series average;
  /// wgss[0] is the within-group cost of `init`; wgss[t] the cost after
  /// iteration t. Cost = sum over members of the accumulated DTW cost.
  std::vector<double> wgss;
  std::size_t iterations_run = 0;
};

DbaResult dba(std::span<const Series> members, std::span<const double> init,
              const DbaOptions& options = {});

Series dba_average(std::span<const Series> members, std::span<const double> init,
                   std::size_t iterations = 10, const DtwParams& params = {});

/// Index of the member with the smallest summed DTW distance to all others
/// (lowest index on ties). Used as the DBA warm start when no centroid exists.
std::size_t dtw_medoid(std::span<const Series> members, const DtwParams& params = {},
                       unsigned threads = 1);

Series arithmetic_mean(std::span<const Series> members);

}  // namespace mcc

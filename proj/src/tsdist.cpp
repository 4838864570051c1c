#include "mcc/tsdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mcc/error.hpp"
#include "mcc/parallel.hpp"

namespace mcc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dtw_inputs(std::size_t n, std::size_t m, const DtwParams& params) {
  if (n == 0 || m == 0) fail(ErrorKind::domain, "dtw: empty series");
  if (params.band_radius) {
    const std::size_t diff = n > m ? n - m : m - n;
    if (*params.band_radius < diff) {
      fail(ErrorKind::constraint,
           "dtw: band radius " + std::to_string(*params.band_radius) +
               " cannot reach the end cell for lengths " + std::to_string(n) +
               " and " + std::to_string(m));
    }
  }
}

struct BandRange {
  std::size_t lo;
  std::size_t hi;  // inclusive
};

BandRange band_range(std::size_t i, std::size_t m, const DtwParams& params) {
  if (!params.band_radius) return {0, m - 1};
  const std::size_t r = *params.band_radius;
  const std::size_t lo = i > r ? i - r : 0;
  const std::size_t hi = std::min(m - 1, i + r);
  return {lo, hi};
}

inline double sq(double x) { return x * x; }

}  // namespace

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::dimension, "euclidean: length mismatch (" +
                                   std::to_string(a.size()) + " vs " +
                                   std::to_string(b.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += sq(a[i] - b[i]);
  return std::sqrt(acc);
}

double dtw_cost(std::span<const double> a, std::span<const double> b,
                const DtwParams& params) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  check_dtw_inputs(n, m, params);

  std::vector<double> prev(m, kInf);
  std::vector<double> curr(m, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = band_range(i, m, params);
    std::fill(curr.begin(), curr.end(), kInf);
    for (std::size_t j = lo; j <= hi; ++j) {
      const double local = sq(a[i] - b[j]);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = kInf;
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, curr[j - 1]);
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      }
      curr[j] = local + best;
    }
    std::swap(prev, curr);
  }
  return prev[m - 1];
}

double dtw_distance(std::span<const double> a, std::span<const double> b,
                    const DtwParams& params) {
  return std::sqrt(dtw_cost(a, b, params));
}

WarpingPath dtw_path(std::span<const double> a, std::span<const double> b,
                     const DtwParams& params) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  check_dtw_inputs(n, m, params);

  std::vector<double> acc(n * m, kInf);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };

  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = band_range(i, m, params);
    for (std::size_t j = lo; j <= hi; ++j) {
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = kInf;
        if (i > 0) best = std::min(best, at(i - 1, j));
        if (j > 0) best = std::min(best, at(i, j - 1));
        if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
      }
      at(i, j) = sq(a[i] - b[j]) + best;
    }
  }

  WarpingPath path;
  path.cost = at(n - 1, m - 1);
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  path.steps.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    path.steps.emplace_back(i, j);
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

DbaResult dba(std::span<const Series> members, std::span<const double> init,
              const DbaOptions& options) {
  if (members.empty()) fail(ErrorKind::domain, "dba: empty member list");
  if (init.empty()) fail(ErrorKind::domain, "dba: empty initial average");

  DbaResult result;
  result.average.assign(init.begin(), init.end());
  const std::size_t len = result.average.size();

  std::vector<WarpingPath> paths(members.size());
  auto align_all = [&] {
    parallel_for(members.size(), options.threads, [&](std::size_t k) {
      paths[k] = dtw_path(result.average, members[k], options.dtw);
    });
    double total = 0.0;
    for (const auto& p : paths) total += p.cost;
    return total;
  };

  result.wgss.push_back(align_all());
  std::vector<double> sums(len);
  std::vector<std::size_t> counts(len);
  for (std::size_t it = 0; it < options.iterations; ++it) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t k = 0; k < members.size(); ++k) {
      for (const auto& [ai, mi] : paths[k].steps) {
        sums[ai] += members[k][mi];
        ++counts[ai];
      }
    }
    double max_shift = 0.0;
    for (std::size_t c = 0; c < len; ++c) {
      const double updated = sums[c] / static_cast<double>(counts[c]);
      max_shift = std::max(max_shift, std::abs(updated - result.average[c]));
      result.average[c] = updated;
    }
    result.wgss.push_back(align_all());
    ++result.iterations_run;
    if (max_shift <= options.tolerance) break;
  }
  return result;
}

Series dba_average(std::span<const Series> members, std::span<const double> init,
                   std::size_t iterations, const DtwParams& params) {
  DbaOptions options;
  options.iterations = iterations;
  options.dtw = params;
  return dba(members, init, options).average;
}

std::size_t dtw_medoid(std::span<const Series> members, const DtwParams& params,
                       unsigned threads) {
  if (members.empty()) fail(ErrorKind::domain, "medoid: empty member list");
  const std::size_t n = members.size();
  std::vector<double> totals(n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) total += dtw_distance(members[i], members[j], params);
    }
    totals[i] = total;
  });
  return static_cast<std::size_t>(
      std::min_element(totals.begin(), totals.end()) - totals.begin());
}

Series arithmetic_mean(std::span<const Series> members) {
  if (members.empty()) fail(ErrorKind::domain, "mean: empty member list");
  const std::size_t len = members.front().size();
  Series mean(len, 0.0);
  for (const auto& m : members) {
    if (m.size() != len) {
      fail(ErrorKind::dimension, "mean: mixed lengths (" + std::to_string(len) +
                                     " vs " + std::to_string(m.size()) + ")");
    }
    for (std::size_t i = 0; i < len; ++i) mean[i] += m[i];
  }
  for (auto& v : mean) v /= static_cast<double>(members.size());
  return mean;
}

}  // namespace mcc

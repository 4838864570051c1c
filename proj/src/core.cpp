#include "mcc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "mcc/error.hpp"
#include "mcc/parallel.hpp"

namespace mcc {
namespace {

std::size_t pick_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

// Model values are kept at single precision so the compact binary format
// round-trips exactly. Thresholds round up so no training positive that sat
// just inside a boundary falls out of it.
float to_float_up(double v) {
  float f = static_cast<float>(v);
  if (static_cast<double>(f) < v) f = std::nextafter(f, std::numeric_limits<float>::infinity());
  return f;
}

MccModel finalize_model(const Metric& metric, std::span<const ClusterState> clusters,
                        ModelMetadata metadata) {
  std::vector<Template> templates;
  templates.reserve(clusters.size());
  for (const auto& c : clusters) {
    Template t;
    t.centroid.reserve(c.centroid.size());
    for (double v : c.centroid) t.centroid.push_back(static_cast<float>(v));
    t.threshold = to_float_up(c.threshold);
    templates.push_back(std::move(t));
  }
  return MccModel(metric, std::move(templates), metadata);
}

// Removes clusters that received no positives and renumbers the assignment.
void drop_empty_clusters(std::vector<Series>& centroids, DistanceTable& table,
                         std::vector<std::size_t>& assignment) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> counts(k, 0);
  for (auto a : assignment) ++counts[a];
  if (std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; })) return;

  std::vector<std::size_t> remap(k, 0);
  std::size_t next = 0;
  std::vector<Series> kept_centroids;
  DistanceTable kept_table;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    remap[c] = next++;
    kept_centroids.push_back(std::move(centroids[c]));
    kept_table.pos.push_back(std::move(table.pos[c]));
    kept_table.neg.push_back(std::move(table.neg[c]));
  }
  if (kept_centroids.empty()) fail(ErrorKind::internal, "clustering: all clusters empty");
  for (auto& a : assignment) a = remap[a];
  centroids = std::move(kept_centroids);
  table = std::move(kept_table);
}

std::vector<ClusterState> build_clusters(const std::vector<Series>& centroids,
                                         const DistanceTable& table,
                                         const std::vector<std::size_t>& assignment) {
  std::vector<std::vector<std::size_t>> members(centroids.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) members[assignment[i]].push_back(i);
  std::vector<ClusterState> clusters;
  clusters.reserve(centroids.size());
  for (std::size_t k = 0; k < centroids.size(); ++k) {
    clusters.push_back(
        evaluate_cluster(centroids[k], std::move(members[k]), table.pos[k], table.neg[k]));
  }
  return clusters;
}

}  // namespace

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::stop_reached: return "stop_reached";
    case Termination::max_clusters: return "max_clusters";
    case Termination::no_splittable: return "no_splittable";
    case Termination::stalled: return "stalled";
  }
  return "unknown";
}

MccModel::MccModel(Metric metric, std::vector<Template> templates, ModelMetadata metadata)
    : metric_(metric), templates_(std::move(templates)), metadata_(metadata) {
  if (templates_.empty()) fail(ErrorKind::domain, "model: no templates");
  for (const auto& t : templates_) {
    if (t.centroid.empty()) fail(ErrorKind::domain, "model: empty centroid");
    if (!(t.threshold >= 0.0) || !std::isfinite(t.threshold)) {
      fail(ErrorKind::domain, "model: threshold must be finite and non-negative");
    }
  }
}

double hinge(double x) noexcept { return x > 0.0 ? x : 0.0; }

double cluster_cost(std::span<const double> pos_dists, std::span<const double> neg_dists) {
  if (neg_dists.empty() || pos_dists.empty()) return 0.0;
  const auto neg = sorted_copy(neg_dists);
  double cost = 0.0;
  for (double p : pos_dists) {
    // Only negatives strictly closer than p contribute.
    for (auto it = neg.begin(); it != neg.end() && *it < p; ++it) cost += p - *it;
  }
  return cost;
}

double total_cost(std::span<const ClusterState> clusters) noexcept {
  double total = 0.0;
  for (const auto& c : clusters) total += c.cost;
  return total;
}

std::vector<std::size_t> negatives_in_radius(std::span<const double> pos_dists,
                                             std::span<const double> neg_dists) {
  std::vector<std::size_t> out;
  if (pos_dists.empty()) return out;
  const double radius = *std::max_element(pos_dists.begin(), pos_dists.end());
  for (std::size_t j = 0; j < neg_dists.size(); ++j) {
    if (neg_dists[j] <= radius) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> negatives_in_radius(std::span<const double> centroid,
                                             std::span<const Series> positives,
                                             std::span<const Series> negatives,
                                             const Metric& metric) {
  if (positives.empty()) fail(ErrorKind::domain, "negatives_in_radius: no positives");
  std::vector<double> pos_d;
  pos_d.reserve(positives.size());
  for (const auto& p : positives) pos_d.push_back(metric.distance(p, centroid));
  std::vector<double> neg_d;
  neg_d.reserve(negatives.size());
  for (const auto& n : negatives) neg_d.push_back(metric.distance(n, centroid));
  return negatives_in_radius(pos_d, neg_d);
}

std::size_t threshold_errors(std::span<const double> pos_dists,
                             std::span<const double> neg_dists, double threshold) noexcept {
  std::size_t errors = 0;
  for (double d : pos_dists) errors += d > threshold ? 1 : 0;
  for (double d : neg_dists) errors += d <= threshold ? 1 : 0;
  return errors;
}

ThresholdChoice select_threshold(std::span<const double> pos_dists,
                                 std::span<const double> neg_dists) {
  if (pos_dists.empty()) fail(ErrorKind::domain, "select_threshold: no positive distances");

  const auto pos = sorted_copy(pos_dists);
  const auto neg = sorted_copy(neg_dists);
  std::vector<double> values;
  values.reserve(pos.size() + neg.size());
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(), std::back_inserter(values));
  values.erase(std::unique(values.begin(), values.end()), values.end());

  std::vector<double> candidates;
  candidates.reserve(values.size() + 1);
  // One candidate below every distance ("nothing inside"). With a zero
  // distance present it is negative; callers clamp stored thresholds to 0,
  // which predict's strict comparison treats the same way.
  if (values.front() > 0.0) {
    candidates.push_back(values.front() / 2.0);
  } else {
    candidates.push_back(-(values.size() >= 2 ? values[1] : 1.0) / 2.0);
  }
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    candidates.push_back(values[i] + (values[i + 1] - values[i]) / 2.0);
  }
  const double top = values.back();
  double margin;
  if (values.size() >= 2) {
    margin = (top - values[values.size() - 2]) / 2.0;
  } else {
    margin = top > 0.0 ? top / 2.0 : 0.5;
  }
  candidates.push_back(top + margin);

  // Candidates ascend, so `<=` keeps the larger threshold on ties.
  ThresholdChoice best{candidates.front(), std::numeric_limits<std::size_t>::max()};
  for (double t : candidates) {
    const auto pos_out = static_cast<std::size_t>(
        pos.end() - std::upper_bound(pos.begin(), pos.end(), t));
    const auto neg_in = static_cast<std::size_t>(
        std::upper_bound(neg.begin(), neg.end(), t) - neg.begin());
    const std::size_t errors = pos_out + neg_in;
    if (errors <= best.errors) best = {t, errors};
  }
  return best;
}

DistanceTable compute_distances(std::span<const Series> centroids,
                                std::span<const Series> positives,
                                std::span<const Series> negatives, const Metric& metric,
                                unsigned threads) {
  const std::size_t k = centroids.size();
  DistanceTable table;
  table.pos.assign(k, std::vector<double>(positives.size()));
  table.neg.assign(k, std::vector<double>(negatives.size()));
  const std::size_t total = positives.size() + negatives.size();
  parallel_for(total, threads, [&](std::size_t s) {
    const bool is_pos = s < positives.size();
    const Series& sample = is_pos ? positives[s] : negatives[s - positives.size()];
    for (std::size_t c = 0; c < k; ++c) {
      const double d = metric.distance(sample, centroids[c]);
      if (is_pos) {
        table.pos[c][s] = d;
      } else {
        table.neg[c][s - positives.size()] = d;
      }
    }
  });
  return table;
}

std::vector<std::size_t> assign_positives(const DistanceTable& distances) {
  const std::size_t k = distances.pos.size();
  if (k == 0) fail(ErrorKind::domain, "assign_positives: no centroids");
  const std::size_t m = distances.pos.front().size();

  // Sorted negatives and prefix sums turn each marginal cost into
  // count * d - (sum of the closer negatives).
  std::vector<std::vector<double>> sorted_neg(k);
  std::vector<std::vector<double>> prefix(k);
  for (std::size_t c = 0; c < k; ++c) {
    sorted_neg[c] = sorted_copy(distances.neg[c]);
    prefix[c].assign(sorted_neg[c].size() + 1, 0.0);
    for (std::size_t j = 0; j < sorted_neg[c].size(); ++j) {
      prefix[c][j + 1] = prefix[c][j] + sorted_neg[c][j];
    }
  }

  std::vector<std::size_t> assignment(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    double best_cost = std::numeric_limits<double>::infinity();
    double best_dist = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double d = distances.pos[c][i];
      const auto closer = static_cast<std::size_t>(
          std::lower_bound(sorted_neg[c].begin(), sorted_neg[c].end(), d) -
          sorted_neg[c].begin());
      const double cost =
          closer == 0 ? 0.0
                      : std::max(0.0, static_cast<double>(closer) * d - prefix[c][closer]);
      if (cost < best_cost || (cost == best_cost && d < best_dist)) {
        best_cost = cost;
        best_dist = d;
        best = c;
      }
    }
    assignment[i] = best;
  }
  return assignment;
}

std::vector<std::size_t> assign_positives(std::span<const Series> centroids,
                                          std::span<const Series> positives,
                                          std::span<const Series> negatives,
                                          const Metric& metric, unsigned threads) {
  if (centroids.empty()) fail(ErrorKind::domain, "assign_positives: no centroids");
  return assign_positives(compute_distances(centroids, positives, negatives, metric, threads));
}

ClusterState evaluate_cluster(Series centroid, std::vector<std::size_t> positives,
                              std::span<const double> pos_dists_all,
                              std::span<const double> neg_dists_all) {
  if (positives.empty()) fail(ErrorKind::internal, "evaluate_cluster: cluster has no positives");
  ClusterState state;
  state.centroid = std::move(centroid);
  std::vector<double> pos_d;
  pos_d.reserve(positives.size());
  for (auto i : positives) pos_d.push_back(pos_dists_all[i]);
  state.positives = std::move(positives);

  state.negatives_in_radius = negatives_in_radius(pos_d, neg_dists_all);
  std::vector<double> in_radius;
  in_radius.reserve(state.negatives_in_radius.size());
  for (auto j : state.negatives_in_radius) in_radius.push_back(neg_dists_all[j]);
  state.cost = cluster_cost(pos_d, in_radius);
  state.threshold = std::max(0.0, select_threshold(pos_d, neg_dists_all).threshold);
  return state;
}

std::vector<ClusterState> discrepancy_clustering(std::span<const Series> seeds,
                                                 std::span<const Series> positives,
                                                 std::span<const Series> negatives,
                                                 const TrainConfig& config) {
  if (seeds.empty()) fail(ErrorKind::domain, "clustering: no seed centroids");
  if (positives.empty()) fail(ErrorKind::domain, "clustering: no positives");
  const Metric& metric = config.metric;

  std::vector<Series> centroids(seeds.begin(), seeds.end());
  DistanceTable table = compute_distances(centroids, positives, negatives, metric, config.threads);
  std::vector<std::size_t> assignment = assign_positives(table);
  drop_empty_clusters(centroids, table, assignment);

  std::vector<ClusterState> best = build_clusters(centroids, table, assignment);
  double best_cost = total_cost(best);
  auto consider = [&](std::vector<ClusterState> candidate) {
    const double cost = total_cost(candidate);
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(candidate);
    }
  };

  for (std::size_t it = 0; it < config.clustering_max_iters; ++it) {
    std::vector<std::vector<Series>> members(centroids.size());
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      members[assignment[i]].push_back(positives[i]);
    }
    std::vector<Series> updated(centroids.size());
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      updated[c] = average_members(metric, members[c], &centroids[c], config.dba_iterations,
                                   config.threads);
    }
    centroids = std::move(updated);
    table = compute_distances(centroids, positives, negatives, metric, config.threads);
    consider(build_clusters(centroids, table, assignment));

    std::vector<std::size_t> next = assign_positives(table);
    drop_empty_clusters(centroids, table, next);
    if (next == assignment) break;
    assignment = std::move(next);
    consider(build_clusters(centroids, table, assignment));
  }
  return best;
}

MccModel train(std::span<const Series> positives, std::span<const Series> negatives,
               const TrainConfig& config, const TrainObserver& observer) {
  if (positives.empty()) fail(ErrorKind::domain, "train: no positive samples");
  if (negatives.empty()) fail(ErrorKind::domain, "train: no negative samples");
  if (config.max_clusters < 1) fail(ErrorKind::config, "train: max_clusters must be >= 1");
  if (config.restarts_per_split < 1) fail(ErrorKind::config, "train: restarts_per_split must be >= 1");
  if (config.stop.mode == StopMode::train_accuracy &&
      !(config.stop.value >= 0.0 && config.stop.value <= 1.0)) {
    fail(ErrorKind::config, "train: accuracy stop value must lie in [0, 1]");
  }
  if (config.stop.mode == StopMode::cost_threshold && !(config.stop.value >= 0.0)) {
    fail(ErrorKind::config, "train: cost stop value must be >= 0");
  }
  if (config.metric.kind == MetricKind::euclidean) {
    const std::size_t dim = positives.front().size();
    auto same = [dim](const Series& s) { return s.size() == dim; };
    if (!std::all_of(positives.begin(), positives.end(), same) ||
        !std::all_of(negatives.begin(), negatives.end(), same)) {
      fail(ErrorKind::dimension, "train: euclidean metric needs equal-length samples");
    }
  }

  std::mt19937_64 rng(config.rng_seed);
  const Series first_seed = positives[pick_index(rng, positives.size())];
  std::vector<ClusterState> clusters =
      discrepancy_clustering(std::span(&first_seed, 1), positives, negatives, config);
  if (observer) observer(clusters);

  ModelMetadata meta;
  meta.positives = positives.size();
  meta.negatives = negatives.size();
  const std::size_t max_attempts = 2 * config.max_clusters;
  std::size_t attempts = 0;

  for (;;) {
    const double cost = total_cost(clusters);
    bool stop = false;
    if (config.stop.mode == StopMode::cost_threshold) {
      stop = cost <= config.stop.value;
    } else {
      const MccModel candidate = finalize_model(config.metric, clusters, meta);
      stop = train_accuracy(candidate, positives, negatives, config.threads) >= config.stop.value;
    }
    if (stop) {
      meta.termination = Termination::stop_reached;
      break;
    }
    if (clusters.size() >= config.max_clusters) {
      meta.termination = Termination::max_clusters;
      break;
    }
    if (attempts >= max_attempts) {
      meta.termination = Termination::stalled;
      break;
    }

    // Worst cluster first; clusters with a single positive cannot be split.
    std::vector<std::size_t> order(clusters.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return clusters[a].cost > clusters[b].cost;
    });
    const auto worst = std::find_if(order.begin(), order.end(), [&](std::size_t k) {
      return clusters[k].positives.size() >= 2;
    });
    if (worst == order.end()) {
      meta.termination = Termination::no_splittable;
      break;
    }
    const std::size_t target = *worst;
    const auto& pool = clusters[target].positives;

    const std::size_t want = clusters.size() + 1;
    std::vector<ClusterState> best;
    for (std::size_t r = 0; r < config.restarts_per_split; ++r) {
      const std::size_t a = pick_index(rng, pool.size());
      std::size_t b = pick_index(rng, pool.size() - 1);
      if (b >= a) ++b;

      std::vector<Series> seeds;
      seeds.reserve(want);
      for (std::size_t k = 0; k < clusters.size(); ++k) {
        seeds.push_back(k == target ? positives[pool[a]] : clusters[k].centroid);
      }
      seeds.push_back(positives[pool[b]]);

      auto candidate = discrepancy_clustering(seeds, positives, negatives, config);
      const bool full = candidate.size() == want;
      const bool best_full = best.size() == want;
      if (best.empty() || (full && !best_full) ||
          (full == best_full && total_cost(candidate) < total_cost(best))) {
        best = std::move(candidate);
      }
    }
    clusters = std::move(best);
    ++attempts;
    ++meta.iterations;
    if (observer) observer(clusters);
  }

  meta.final_cost = total_cost(clusters);
  MccModel model = finalize_model(config.metric, clusters, meta);
  meta.train_accuracy = train_accuracy(model, positives, negatives, config.threads);
  return MccModel(config.metric, std::vector<Template>(model.templates().begin(),
                                                       model.templates().end()),
                  meta);
}

Prediction predict(const MccModel& model, std::span<const double> sample, double adjust) {
  if (model.metric().kind == MetricKind::euclidean &&
      sample.size() != model.templates().front().centroid.size()) {
    fail(ErrorKind::dimension, "predict: sample length " + std::to_string(sample.size()) +
                                   " does not match template length " +
                                   std::to_string(model.templates().front().centroid.size()));
  }
  Prediction out;
  out.nearest_distance = std::numeric_limits<double>::infinity();
  out.margin = std::numeric_limits<double>::infinity();
  const auto templates = model.templates();
  for (std::size_t k = 0; k < templates.size(); ++k) {
    const double d = model.metric().distance(sample, templates[k].centroid);
    if (d < out.nearest_distance) {
      out.nearest_distance = d;
      out.nearest_template = k;
    }
    out.margin = std::min(out.margin, d - templates[k].threshold);
  }
  out.label = out.margin < adjust ? Label::positive : Label::negative;
  return out;
}

double train_accuracy(const MccModel& model, std::span<const Series> positives,
                      std::span<const Series> negatives, unsigned threads) {
  const std::size_t total = positives.size() + negatives.size();
  if (total == 0) return 0.0;
  std::vector<unsigned char> correct(total, 0);
  parallel_for(total, threads, [&](std::size_t s) {
    const bool is_pos = s < positives.size();
    const Series& sample = is_pos ? positives[s] : negatives[s - positives.size()];
    const Label want = is_pos ? Label::positive : Label::negative;
    correct[s] = predict(model, sample).label == want ? 1 : 0;
  });
  const auto hits = std::count(correct.begin(), correct.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace mcc

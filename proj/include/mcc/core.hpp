#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mcc/metric.hpp"
#include "mcc/tsdist.hpp"

namespace mcc {

enum class Label : std::uint8_t { negative = 0, positive = 1 };

/// A centroid and the distance below which a sample counts as matched.
struct Template {
  Series centroid;
  double threshold = 0.0;

  friend bool operator==(const Template&, const Template&) = default;
};

/// Working state of one cluster during training. Indices refer to the
/// positive / negative training sets passed to the clustering routine.
struct ClusterState {
  Series centroid;
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives_in_radius;
  double threshold = 0.0;
  double cost = 0.0;
};

enum class StopMode { cost_threshold, train_accuracy };

struct StopCriterion {
  StopMode mode = StopMode::train_accuracy;
  /// Maximum total cost (cost mode) or minimum training accuracy in [0, 1].
  double value = 0.95;
};

struct TrainConfig {
  Metric metric;
  StopCriterion stop;
  std::size_t max_clusters = 64;
  std::uint64_t rng_seed = 7;
  std::size_t clustering_max_iters = 20;
  std::size_t restarts_per_split = 3;
  std::size_t dba_iterations = 10;
  /// Worker count for distance evaluation. Never affects the result.
  unsigned threads = 1;
};

enum class Termination {
  stop_reached,
  max_clusters,   // stop criterion unmet when K hit max_clusters
  no_splittable,  // every cluster holds a single positive
  stalled,        // splits kept collapsing back to K clusters
};

const char* to_string(Termination t) noexcept;

struct ModelMetadata {
  std::size_t positives = 0;   // M
  std::size_t negatives = 0;   // N
  std::size_t iterations = 0;  // outer split iterations T
  double final_cost = 0.0;
  double train_accuracy = 0.0;
  Termination termination = Termination::stop_reached;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

class MccModel {
 public:
  /// Throws domain error on an empty template list, a negative threshold or an
  /// empty centroid.
  MccModel(Metric metric, std::vector<Template> templates, ModelMetadata metadata = {});

  const Metric& metric() const noexcept { return metric_; }
  std::span<const Template> templates() const noexcept { return templates_; }
  std::size_t size() const noexcept { return templates_.size(); }
  const ModelMetadata& metadata() const noexcept { return metadata_; }

  friend bool operator==(const MccModel&, const MccModel&) = default;

 private:
  Metric metric_;
  std::vector<Template> templates_;
  ModelMetadata metadata_;
};

struct Prediction {
  Label label = Label::negative;
  std::size_t nearest_template = 0;  // argmin distance, lowest index on ties
  double nearest_distance = 0.0;
  /// min over templates of (distance - threshold). The sample is positive
  /// under adjustment a iff margin < a.
  double margin = 0.0;
};

double hinge(double x) noexcept;

/// Sum over all (positive, negative) pairs of hinge(pos - neg). `neg_dists`
/// must already be restricted to the cluster's in-radius negatives.
double cluster_cost(std::span<const double> pos_dists, std::span<const double> neg_dists);

double total_cost(std::span<const ClusterState> clusters) noexcept;

/// Indices j with neg_dists[j] <= max(pos_dists).
std::vector<std::size_t> negatives_in_radius(std::span<const double> pos_dists,
                                             std::span<const double> neg_dists);

std::vector<std::size_t> negatives_in_radius(std::span<const double> centroid,
                                             std::span<const Series> positives,
                                             std::span<const Series> negatives,
                                             const Metric& metric);

struct ThresholdChoice {
  double threshold = 0.0;
  std::size_t errors = 0;  // positives with d > threshold + negatives with d <= threshold
};

std::size_t threshold_errors(std::span<const double> pos_dists,
                             std::span<const double> neg_dists, double threshold) noexcept;

/// Scans candidate thresholds (midpoints between adjacent distinct distances,
/// one value below the smallest and one past the largest) and returns the one
/// with the fewest errors, preferring the larger threshold on ties. The
/// below-smallest candidate is negative when some distance is 0.
ThresholdChoice select_threshold(std::span<const double> pos_dists,
                                 std::span<const double> neg_dists);

/// Distances from every sample to every centroid: rows are centroids.
struct DistanceTable {
  std::vector<std::vector<double>> pos;  // pos[k][i]
  std::vector<std::vector<double>> neg;  // neg[k][j]
};

DistanceTable compute_distances(std::span<const Series> centroids,
                                std::span<const Series> positives,
                                std::span<const Series> negatives, const Metric& metric,
                                unsigned threads = 1);

/// Each positive joins the cluster minimising its own discrepancy
/// contribution sum_j hinge(d(m, C_k) - d(n_j, C_k)); ties go to the smaller
/// d(m, C_k), then to the lower cluster index.
std::vector<std::size_t> assign_positives(const DistanceTable& distances);

std::vector<std::size_t> assign_positives(std::span<const Series> centroids,
                                          std::span<const Series> positives,
                                          std::span<const Series> negatives,
                                          const Metric& metric, unsigned threads = 1);

/// Rebuilds radius membership, threshold and cost for a cluster given its
/// positives' distances and the distances of all negatives to its centroid.
ClusterState evaluate_cluster(Series centroid, std::vector<std::size_t> positives,
                              std::span<const double> pos_dists_all,
                              std::span<const double> neg_dists_all);

std::vector<ClusterState> discrepancy_clustering(std::span<const Series> seeds,
                                                 std::span<const Series> positives,
                                                 std::span<const Series> negatives,
                                                 const TrainConfig& config);

/// Called with the cluster set after the initial clustering and after every
/// split iteration.
using TrainObserver = std::function<void(std::span<const ClusterState>)>;

MccModel train(std::span<const Series> positives, std::span<const Series> negatives,
               const TrainConfig& config, const TrainObserver& observer = {});

Prediction predict(const MccModel& model, std::span<const double> sample,
                   double adjust = 0.0);

double train_accuracy(const MccModel& model, std::span<const Series> positives,
                      std::span<const Series> negatives, unsigned threads = 1);

}  // namespace mcc

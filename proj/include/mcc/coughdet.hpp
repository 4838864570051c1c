#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcc/core.hpp"
#include "mcc/datasets.hpp"
#include "mcc/dsp.hpp"

namespace mcc::cough {

inline constexpr std::array<const char*, 3> kAxisNames = {"ax", "ay", "az"};

/// Copies of the sessions with every channel smoothed and high-passed.
std::vector<data::Session> preprocess_sessions(std::span<const data::Session> sessions,
                                               const dsp::FilterSpec& filter);

struct InstanceOptions {
  dsp::WindowSpec positive_window{0.4, std::nullopt};
  dsp::WindowSpec negative_window{0.4, 0.1};
  std::size_t negative_count = 500;
};

/// Per-axis training series plus the subject each instance came from.
struct AxisInstances {
  std::array<std::vector<Series>, 3> positives;
  std::array<std::vector<Series>, 3> negatives;
  std::vector<std::string> positive_subjects;
  std::vector<std::string> negative_subjects;
  std::size_t candidate_negatives = 0;
  /// Fewer candidate windows than requested; all of them were used.
  bool negatives_short = false;
};

/// Positives are centred slices at every annotated cough of the seated cough
/// sessions; negatives a seeded sample (without replacement) of the strided
/// windows over non-cough sessions. Config error when there is no non-cough
/// session; bounds error when an annotation is too close to a recording edge.
AxisInstances build_instances(std::span<const data::Session> sessions, std::uint64_t seed,
                              const InstanceOptions& options = {});

class AxisEnsemble {
 public:
  /// Exactly three models sharing one metric.
  explicit AxisEnsemble(std::vector<MccModel> models);
  const MccModel& axis(std::size_t i) const { return models_.at(i); }
  std::span<const MccModel> models() const noexcept { return models_; }

 private:
  std::vector<MccModel> models_;
};

/// Three independent trainings with identical config. Errors keep their kind
/// and gain the axis name.
AxisEnsemble train_axis_models(const AxisInstances& instances, const TrainConfig& config);

/// Samples [start_sample, end_sample] inclusive; seconds are start/rate and
/// (end + 1)/rate.
struct CoughEvent {
  std::size_t start_sample = 0;
  std::size_t end_sample = 0;
  double start = 0.0;
  double end = 0.0;

  friend bool operator==(const CoughEvent&, const CoughEvent&) = default;
};

/// Merges positive windows whose sample ranges overlap or touch into maximal
/// events. Windows are given by start index; all have `window` samples.
std::vector<CoughEvent> merge_events(std::span<const std::size_t> starts,
                                     std::span<const std::uint8_t> labels, std::size_t window,
                                     double sample_rate);

/// Merging an already merged list (as windows of their own extent) is a no-op.
std::vector<CoughEvent> merge_events(std::span<const CoughEvent> events, double sample_rate);

/// Per window, the second smallest of the three axis margins. With 2-of-3
/// voting a window is positive at adjust a iff this value is < a.
struct SessionMargins {
  std::vector<std::size_t> starts;
  std::vector<double> vote_margin;
  std::size_t window = 0;
};

SessionMargins session_margins(const AxisEnsemble& ensemble, const data::Session& session,
                               const dsp::WindowSpec& window, unsigned threads = 1);

struct SessionPrediction {
  std::vector<std::size_t> starts;
  std::vector<std::uint8_t> labels;
  std::vector<CoughEvent> events;
};

SessionPrediction label_session(const SessionMargins& margins, double adjust, double sample_rate);

/// Single-sample-stride inference with 2-of-3 axis voting.
SessionPrediction predict_session(const AxisEnsemble& ensemble, const data::Session& session,
                                  double adjust, double window_len = 0.4, unsigned threads = 1);

/// Detected fraction of ground-truth coughs; a cough is detected when an
/// event intersects its centred window. Absent for no ground truth.
std::optional<double> event_sensitivity(std::span<const CoughEvent> events,
                                        std::span<const double> cough_centers,
                                        double sample_rate, std::size_t window);

/// Mean over sessions of 1 - positive windows / windows; sessions without
/// windows are skipped. Absent when no session has windows.
std::optional<double> window_specificity(std::span<const std::vector<std::uint8_t>> session_labels);

struct PipelineConfig {
  TrainConfig train = [] {
    TrainConfig c;
    c.metric = Metric::dynamic_time_warping();
    return c;
  }();
  dsp::FilterSpec filter;
  InstanceOptions instances;
  double window_len = 0.4;  // inference window, single-sample stride
  std::uint64_t seed = 7;   // negative subsampling
  bool preprocess = true;
};

struct SubjectResult {
  std::string subject;
  std::optional<double> sens_seated;
  std::optional<double> sens_all;
  std::optional<double> spec;
  std::size_t coughs_seated = 0;
  std::size_t detected_seated = 0;
  std::size_t coughs_all = 0;
  std::size_t detected_all = 0;
  std::size_t noncough_windows = 0;
  std::size_t false_windows = 0;
  std::array<std::size_t, 3> templates{};
};

struct EvalReport {
  double adjust = 0.0;
  /// Means of the present per-subject values.
  std::optional<double> sens_seated;
  std::optional<double> sens_all;
  std::optional<double> spec;
  std::vector<SubjectResult> per_subject;
  bool negatives_short = false;
};

struct RocPoint {
  double fpr = 0.0;  // 1 - specificity
  double tpr = 0.0;  // all-session sensitivity
  double adjust = 0.0;
};

struct FoldInfo {
  std::string subject;
  std::array<std::size_t, 3> templates{};
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct SweepResult {
  std::vector<EvalReport> reports;  // ascending adjust
  std::vector<RocPoint> roc;
  std::vector<FoldInfo> folds;
};

/// Leave-one-subject-out: per held-out subject, one ensemble is trained on
/// the other subjects and scored at every adjust value.
SweepResult threshold_sweep(std::span<const data::Session> sessions, const PipelineConfig& config,
                            std::span<const double> adjusts);

EvalReport loso_evaluate(std::span<const data::Session> sessions, const PipelineConfig& config,
                         double adjust);

std::string report_to_json(const EvalReport& report);
std::string sweep_to_json(const SweepResult& sweep);
/// Header `fpr,tpr,adjust`.
std::string roc_csv(std::span<const RocPoint> points);

}  // namespace mcc::cough

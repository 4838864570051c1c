#include "mcc/coughdet.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "mcc/error.hpp"
#include "mcc/parallel.hpp"
#include "text_util.hpp"

namespace mcc::cough {
namespace {

using ordered_json = nlohmann::ordered_json;

dsp::Channels channels_of(const data::Session& s) {
  return {s.channels[0], s.channels[1], s.channels[2]};
}

std::string session_label(const data::Session& s) {
  std::string label = s.subject_id + "/" + data::to_string(s.type);
  if (!s.source.empty()) label += " (" + s.source + ")";
  return label;
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> mean_present(const std::vector<SubjectResult>& rows,
                                   std::optional<double> SubjectResult::*field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.*field) {
      sum += *(r.*field);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::size_t count_detected(std::span<const CoughEvent> events, std::span<const double> centers,
                           double rate, std::size_t window) {
  std::size_t detected = 0;
  for (double c : centers) {
    const long long lo = std::llround(c * rate) - static_cast<long long>(window / 2);
    const long long hi = lo + static_cast<long long>(window) - 1;
    for (const auto& e : events) {
      if (static_cast<long long>(e.start_sample) <= hi && lo <= static_cast<long long>(e.end_sample)) {
        ++detected;
        break;
      }
    }
  }
  return detected;
}

}  // namespace

std::vector<data::Session> preprocess_sessions(std::span<const data::Session> sessions,
                                               const dsp::FilterSpec& filter) {
  std::vector<data::Session> out(sessions.begin(), sessions.end());
  for (auto& s : out) {
    dsp::FilterSpec spec = filter;
    spec.sample_rate = s.sample_rate;
    for (auto& ch : s.channels) ch = dsp::preprocess(ch, spec);
  }
  return out;
}

AxisInstances build_instances(std::span<const data::Session> sessions, std::uint64_t seed,
                              const InstanceOptions& options) {
  AxisInstances out;
  for (const auto& s : sessions) {
    if (s.type != data::SessionType::cough_seated) continue;
    const auto channels = channels_of(s);
    for (double center : s.cough_centers) {
      dsp::Channels slice;
      try {
        slice = dsp::slice_centered(channels, center, options.positive_window, s.sample_rate);
      } catch (const Error& e) {
        fail(e.kind(), session_label(s) + ": " + e.what());
      }
      for (std::size_t a = 0; a < 3; ++a) out.positives[a].push_back(std::move(slice[a]));
      out.positive_subjects.push_back(s.subject_id);
    }
  }

  // Candidate negatives: (session index, start) over every non-cough session.
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  std::size_t noncough_sessions = 0;
  std::vector<std::size_t> window_len(sessions.size(), 0);
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const auto& s = sessions[i];
    if (data::is_cough_session(s.type)) continue;
    ++noncough_sessions;
    const std::size_t len = dsp::window_samples(options.negative_window, s.sample_rate);
    window_len[i] = len;
    for (std::size_t start : dsp::window_starts(
             s.length(), len, dsp::stride_samples(options.negative_window, s.sample_rate))) {
      candidates.emplace_back(i, start);
    }
  }
  if (noncough_sessions == 0) fail(ErrorKind::config, "build_instances: no non-cough sessions");

  out.candidate_negatives = candidates.size();
  const std::size_t take = std::min(options.negative_count, candidates.size());
  out.negatives_short = take < options.negative_count;

  // Partial Fisher-Yates, then restore candidate order so the selection, not
  // the draw order, defines the instance list.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(take);
  std::sort(order.begin(), order.end());

  for (std::size_t idx : order) {
    const auto [si, start] = candidates[idx];
    const auto& s = sessions[si];
    for (std::size_t a = 0; a < 3; ++a) {
      const auto& ch = s.channels[a];
      out.negatives[a].emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(start),
                                    ch.begin() + static_cast<std::ptrdiff_t>(start + window_len[si]));
    }
    out.negative_subjects.push_back(s.subject_id);
  }
  return out;
}

AxisEnsemble::AxisEnsemble(std::vector<MccModel> models) : models_(std::move(models)) {
  if (models_.size() != 3) fail(ErrorKind::dimension, "axis ensemble needs exactly 3 models");
  for (const auto& m : models_) {
    if (!(m.metric() == models_.front().metric())) {
      fail(ErrorKind::config, "axis ensemble models use different metrics");
    }
  }
}

AxisEnsemble train_axis_models(const AxisInstances& instances, const TrainConfig& config) {
  std::vector<MccModel> models;
  for (std::size_t a = 0; a < 3; ++a) {
    try {
      models.push_back(train(instances.positives[a], instances.negatives[a], config));
    } catch (const Error& e) {
      fail(e.kind(), std::string("axis ") + kAxisNames[a] + ": " + e.what());
    }
  }
  return AxisEnsemble(std::move(models));
}

std::vector<CoughEvent> merge_events(std::span<const std::size_t> starts,
                                     std::span<const std::uint8_t> labels, std::size_t window,
                                     double sample_rate) {
  if (starts.size() != labels.size()) {
    fail(ErrorKind::dimension, "merge_events: starts and labels differ in length");
  }
  std::vector<CoughEvent> events;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (!labels[i] || window == 0) continue;
    const std::size_t s = starts[i];
    const std::size_t e = s + window - 1;
    if (!events.empty() && s <= events.back().end_sample + 1) {
      events.back().end_sample = std::max(events.back().end_sample, e);
    } else {
      events.push_back({s, e, 0.0, 0.0});
    }
  }
  for (auto& ev : events) {
    ev.start = static_cast<double>(ev.start_sample) / sample_rate;
    ev.end = static_cast<double>(ev.end_sample + 1) / sample_rate;
  }
  return events;
}

std::vector<CoughEvent> merge_events(std::span<const CoughEvent> events, double sample_rate) {
  std::vector<CoughEvent> sorted(events.begin(), events.end());
  std::sort(sorted.begin(), sorted.end(), [](const CoughEvent& a, const CoughEvent& b) {
    return a.start_sample < b.start_sample;
  });
  std::vector<CoughEvent> out;
  for (const auto& ev : sorted) {
    if (!out.empty() && ev.start_sample <= out.back().end_sample + 1) {
      out.back().end_sample = std::max(out.back().end_sample, ev.end_sample);
    } else {
      out.push_back(ev);
    }
  }
  for (auto& ev : out) {
    ev.start = static_cast<double>(ev.start_sample) / sample_rate;
    ev.end = static_cast<double>(ev.end_sample + 1) / sample_rate;
  }
  return out;
}

SessionMargins session_margins(const AxisEnsemble& ensemble, const data::Session& session,
                               const dsp::WindowSpec& window, unsigned threads) {
  SessionMargins out;
  out.window = dsp::window_samples(window, session.sample_rate);
  out.starts = dsp::window_starts(session.length(), out.window,
                                  dsp::stride_samples(window, session.sample_rate));
  out.vote_margin.resize(out.starts.size());
  parallel_for(out.starts.size(), threads, [&](std::size_t w) {
    std::array<double, 3> m{};
    for (std::size_t a = 0; a < 3; ++a) {
      const std::span<const double> slice(session.channels[a].data() + out.starts[w], out.window);
      m[a] = predict(ensemble.axis(a), slice).margin;
    }
    std::sort(m.begin(), m.end());
    out.vote_margin[w] = m[1];
  });
  return out;
}

SessionPrediction label_session(const SessionMargins& margins, double adjust, double sample_rate) {
  SessionPrediction out;
  out.starts = margins.starts;
  out.labels.resize(margins.vote_margin.size());
  for (std::size_t i = 0; i < margins.vote_margin.size(); ++i) {
    out.labels[i] = margins.vote_margin[i] < adjust ? 1 : 0;
  }
  out.events = merge_events(out.starts, out.labels, margins.window, sample_rate);
  return out;
}

SessionPrediction predict_session(const AxisEnsemble& ensemble, const data::Session& session,
                                  double adjust, double window_len, unsigned threads) {
  const auto margins =
      session_margins(ensemble, session, dsp::WindowSpec::single_sample(window_len), threads);
  return label_session(margins, adjust, session.sample_rate);
}

std::optional<double> event_sensitivity(std::span<const CoughEvent> events,
                                        std::span<const double> cough_centers,
                                        double sample_rate, std::size_t window) {
  if (cough_centers.empty()) return std::nullopt;
  return static_cast<double>(count_detected(events, cough_centers, sample_rate, window)) /
         static_cast<double>(cough_centers.size());
}

std::optional<double> window_specificity(std::span<const std::vector<std::uint8_t>> session_labels) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& labels : session_labels) {
    if (labels.empty()) continue;
    const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    sum += 1.0 - positives / static_cast<double>(labels.size());
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

SweepResult threshold_sweep(std::span<const data::Session> sessions, const PipelineConfig& config,
                            std::span<const double> adjusts) {
  if (adjusts.empty()) fail(ErrorKind::domain, "threshold_sweep: no adjust values");
  std::vector<double> grid(adjusts.begin(), adjusts.end());
  std::sort(grid.begin(), grid.end());

  const std::vector<data::Session> prepared =
      config.preprocess ? preprocess_sessions(sessions, config.filter)
                        : std::vector<data::Session>(sessions.begin(), sessions.end());

  std::set<std::string> subject_set;
  for (const auto& s : prepared) subject_set.insert(s.subject_id);
  if (subject_set.size() < 2) {
    fail(ErrorKind::config, "leave-one-subject-out needs at least 2 subjects");
  }

  SweepResult result;
  result.reports.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) result.reports[g].adjust = grid[g];

  const dsp::WindowSpec inference = dsp::WindowSpec::single_sample(config.window_len);
  for (const auto& subject : subject_set) {
    std::vector<data::Session> train_sessions;
    std::vector<const data::Session*> test_sessions;
    for (const auto& s : prepared) {
      if (s.subject_id == subject) {
        test_sessions.push_back(&s);
      } else {
        train_sessions.push_back(s);
      }
    }
    if (test_sessions.empty()) {
      fail(ErrorKind::config, "subject " + subject + " has no sessions");
    }

    const auto instances = build_instances(train_sessions, config.seed, config.instances);
    for (const auto* ids : {&instances.positive_subjects, &instances.negative_subjects}) {
      if (std::find(ids->begin(), ids->end(), subject) != ids->end()) {
        fail(ErrorKind::internal, "fold " + subject + ": held-out subject leaked into training");
      }
    }
    if (instances.positives[0].empty()) {
      fail(ErrorKind::config, "fold " + subject + ": no seated cough annotations to train on");
    }
    const AxisEnsemble ensemble = train_axis_models(instances, config.train);

    FoldInfo fold;
    fold.subject = subject;
    fold.positives = instances.positives[0].size();
    fold.negatives = instances.negatives[0].size();
    for (std::size_t a = 0; a < 3; ++a) fold.templates[a] = ensemble.axis(a).size();
    result.folds.push_back(fold);

    std::vector<SessionMargins> margins;
    margins.reserve(test_sessions.size());
    for (const auto* s : test_sessions) {
      margins.push_back(session_margins(ensemble, *s, inference, config.train.threads));
    }

    for (std::size_t g = 0; g < grid.size(); ++g) {
      SubjectResult row;
      row.subject = subject;
      row.templates = fold.templates;
      std::vector<std::vector<std::uint8_t>> noncough_labels;
      for (std::size_t i = 0; i < test_sessions.size(); ++i) {
        const auto& s = *test_sessions[i];
        const auto pred = label_session(margins[i], grid[g], s.sample_rate);
        if (data::is_cough_session(s.type)) {
          const std::size_t detected =
              count_detected(pred.events, s.cough_centers, s.sample_rate, margins[i].window);
          row.coughs_all += s.cough_centers.size();
          row.detected_all += detected;
          if (s.type == data::SessionType::cough_seated) {
            row.coughs_seated += s.cough_centers.size();
            row.detected_seated += detected;
          }
        } else {
          row.noncough_windows += pred.labels.size();
          row.false_windows +=
              static_cast<std::size_t>(std::count(pred.labels.begin(), pred.labels.end(), 1));
          noncough_labels.push_back(pred.labels);
        }
      }
      if (row.coughs_seated > 0) {
        row.sens_seated = static_cast<double>(row.detected_seated) / static_cast<double>(row.coughs_seated);
      }
      if (row.coughs_all > 0) {
        row.sens_all = static_cast<double>(row.detected_all) / static_cast<double>(row.coughs_all);
      }
      row.spec = window_specificity(noncough_labels);
      result.reports[g].per_subject.push_back(std::move(row));
      result.reports[g].negatives_short = result.reports[g].negatives_short || instances.negatives_short;
    }
  }

  for (auto& report : result.reports) {
    report.sens_seated = mean_present(report.per_subject, &SubjectResult::sens_seated);
    report.sens_all = mean_present(report.per_subject, &SubjectResult::sens_all);
    report.spec = mean_present(report.per_subject, &SubjectResult::spec);
    if (report.sens_all && report.spec) {
      result.roc.push_back({1.0 - *report.spec, *report.sens_all, report.adjust});
    }
  }
  return result;
}

EvalReport loso_evaluate(std::span<const data::Session> sessions, const PipelineConfig& config,
                         double adjust) {
  const double grid[1] = {adjust};
  return std::move(threshold_sweep(sessions, config, grid).reports.front());
}

namespace {

ordered_json report_json(const EvalReport& report) {
  ordered_json subjects = ordered_json::array();
  for (const auto& r : report.per_subject) {
    subjects.push_back({{"subject", r.subject},
                        {"sens_seated", optional_json(r.sens_seated)},
                        {"sens_all", optional_json(r.sens_all)},
                        {"spec", optional_json(r.spec)},
                        {"coughs_seated", r.coughs_seated},
                        {"detected_seated", r.detected_seated},
                        {"coughs_all", r.coughs_all},
                        {"detected_all", r.detected_all},
                        {"noncough_windows", r.noncough_windows},
                        {"false_windows", r.false_windows},
                        {"templates", r.templates}});
  }
  return {{"adjust", report.adjust},
          {"macro",
           {{"sens_seated", optional_json(report.sens_seated)},
            {"sens_all", optional_json(report.sens_all)},
            {"spec", optional_json(report.spec)}}},
          {"per_subject", std::move(subjects)},
          {"negatives_short", report.negatives_short}};
}

}  // namespace

std::string report_to_json(const EvalReport& report) { return report_json(report).dump(2) + "\n"; }

std::string sweep_to_json(const SweepResult& sweep) {
  ordered_json reports = ordered_json::array();
  for (const auto& r : sweep.reports) reports.push_back(report_json(r));
  ordered_json folds = ordered_json::array();
  for (const auto& f : sweep.folds) {
    folds.push_back({{"subject", f.subject},
                     {"positives", f.positives},
                     {"negatives", f.negatives},
                     {"templates", f.templates}});
  }
  ordered_json doc = {{"reports", std::move(reports)}, {"folds", std::move(folds)}};
  return doc.dump(2) + "\n";
}

std::string roc_csv(std::span<const RocPoint> points) {
  std::string out = "fpr,tpr,adjust\n";
  for (const auto& p : points) {
    out += detail::format_double(p.fpr) + "," + detail::format_double(p.tpr) + "," +
           detail::format_double(p.adjust) + "\n";
  }
  return out;
}

}  // namespace mcc::cough

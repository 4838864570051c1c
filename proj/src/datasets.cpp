#include "mcc/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>

#include <json.hpp>

#include "mcc/error.hpp"
#include "mcc/fileio.hpp"
#include "text_util.hpp"

namespace mcc::data {
namespace fs = std::filesystem;
using detail::format_double;
using detail::parse_finite;
using detail::trim;

std::size_t LabeledDataset::count(Label label) const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::vector<Series> LabeledDataset::of(Label label) const {
  std::vector<Series> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (labels[i] == label) out.push_back(samples[i]);
  }
  return out;
}

LabeledDataset gen_snowman(std::size_t n, SnowmanComponent positive, std::uint64_t seed) {
  if (n < 2) fail(ErrorKind::domain, "gen_snowman: n must be >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  const auto n_pos = static_cast<std::size_t>(std::llround(2.0 * static_cast<double>(n) / 3.0));
  const std::size_t n_neg = n - n_pos;
  auto draw = [&](SnowmanComponent c) {
    const bool body = c == SnowmanComponent::body;
    const double sigma = body ? 3.0 : 1.0;
    const double mu_y = body ? 0.0 : 3.0;
    const double x = sigma * unit(rng);
    const double y = mu_y + sigma * unit(rng);
    return Series{x, y};
  };
  const SnowmanComponent other =
      positive == SnowmanComponent::body ? SnowmanComponent::head : SnowmanComponent::body;

  LabeledDataset ds;
  ds.samples.reserve(n);
  ds.labels.reserve(n);
  for (std::size_t i = 0; i < n_pos; ++i) {
    ds.samples.push_back(draw(positive));
    ds.labels.push_back(Label::positive);
  }
  for (std::size_t i = 0; i < n_neg; ++i) {
    ds.samples.push_back(draw(other));
    ds.labels.push_back(Label::negative);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  LabeledDataset shuffled;
  shuffled.provenance = std::string("snowman n=") + std::to_string(n) + " positive=" +
                        (positive == SnowmanComponent::body ? "body" : "head") +
                        " seed=" + std::to_string(seed);
  for (auto i : order) {
    shuffled.samples.push_back(std::move(ds.samples[i]));
    shuffled.labels.push_back(ds.labels[i]);
  }
  return shuffled;
}

std::string normalize_label(std::string_view raw) {
  const auto s = trim(raw);
  if (const auto v = parse_finite(s)) {
    if (std::floor(*v) == *v && std::abs(*v) < 1e15) {
      return std::to_string(static_cast<long long>(*v));
    }
  }
  return std::string(s);
}

LabeledDataset parse_ucr(std::string_view text, const ClassMapping& mapping,
                         std::string provenance) {
  for (const auto& label : mapping.positive) {
    if (mapping.negative.contains(label)) {
      fail(ErrorKind::config, "ucr: label '" + label + "' is both positive and negative");
    }
  }
  std::set<std::string> pos, neg;
  for (const auto& l : mapping.positive) pos.insert(normalize_label(l));
  for (const auto& l : mapping.negative) neg.insert(normalize_label(l));

  LabeledDataset ds;
  ds.provenance = std::move(provenance);
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (trim(line).empty()) return;
    std::vector<std::string_view> fields;
    if (line.find('\t') != std::string_view::npos) {
      fields = detail::split(trim(line), '\t');
    } else if (line.find(',') != std::string_view::npos) {
      fields = detail::split(trim(line), ',');
    } else {
      fields = detail::split_whitespace(line);
    }
    if (fields.size() < 2) {
      throw ParseError("ucr line " + std::to_string(line_no) + ": expected a label and values",
                       line_no);
    }
    const std::string label = normalize_label(fields[0]);
    Series values;
    values.reserve(fields.size() - 1);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto v = parse_finite(fields[f]);
      if (!v) {
        throw ParseError("ucr line " + std::to_string(line_no) + ": field " +
                             std::to_string(f + 1) + " is not a finite number",
                         line_no);
      }
      values.push_back(*v);
    }
    if (pos.contains(label)) {
      ds.samples.push_back(std::move(values));
      ds.labels.push_back(Label::positive);
    } else if (neg.contains(label)) {
      ds.samples.push_back(std::move(values));
      ds.labels.push_back(Label::negative);
    }
  });
  return ds;
}

LabeledDataset load_ucr(const fs::path& path, const ClassMapping& mapping) {
  return parse_ucr(read_text_file(path), mapping, path.string());
}

std::string format_ucr(const LabeledDataset& ds) {
  std::string out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out += ds.labels[i] == Label::positive ? "1" : "0";
    for (double v : ds.samples[i]) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void save_ucr(const fs::path& path, const LabeledDataset& ds) {
  write_file_atomic(path, format_ucr(ds));
}

std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds,
                                                           double train_fraction,
                                                           std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail(ErrorKind::domain, "split: train fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::vector<bool> in_train(ds.size(), false);
  for (Label label : {Label::positive, Label::negative}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] == label) idx.push_back(i);
    }
    if (idx.empty()) continue;
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(idx.size())));
    if (n_train == 0 || n_train == idx.size()) {
      fail(ErrorKind::domain, std::string("split: fraction leaves the ") +
                                  (label == Label::positive ? "positive" : "negative") +
                                  " class empty on one side");
    }
    for (std::size_t k = 0; k < n_train; ++k) in_train[idx[k]] = true;
  }
  LabeledDataset train, test;
  train.provenance = ds.provenance + " [train]";
  test.provenance = ds.provenance + " [test]";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto& part = in_train[i] ? train : test;
    part.samples.push_back(ds.samples[i]);
    part.labels.push_back(ds.labels[i]);
  }
  return {std::move(train), std::move(test)};
}

LabeledDataset gen_trace_like(std::size_t per_class, std::size_t length, std::uint64_t seed) {
  if (per_class == 0 || length < 40) fail(ErrorKind::domain, "gen_trace_like: too small");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  const double len = static_cast<double>(length);
  std::uniform_real_distribution<double> onset(0.3 * len, 0.5 * len);
  std::uniform_real_distribution<double> pulse_len(0.15 * len, 0.25 * len);

  LabeledDataset ds;
  ds.provenance = "trace-like per_class=" + std::to_string(per_class) +
                  " length=" + std::to_string(length) + " seed=" + std::to_string(seed);
  for (std::size_t c = 0; c < 2 * per_class; ++c) {
    const bool positive = c % 2 == 0;
    const double t0 = onset(rng);
    const double width = pulse_len(rng);
    Series s(length);
    for (std::size_t i = 0; i < length; ++i) {
      const double t = static_cast<double>(i);
      double v = 0.0;
      if (positive) {
        if (t >= t0) {
          const double dt = t - t0;
          v = 1.0 + 0.6 * std::exp(-dt / 12.0) * std::sin(2.0 * std::numbers::pi * dt / 10.0);
        }
      } else {
        if (t >= t0 && t < t0 + width) v = 1.0;
      }
      s[i] = v + noise(rng);
    }
    ds.samples.push_back(std::move(s));
    ds.labels.push_back(positive ? Label::positive : Label::negative);
  }
  return ds;
}

// ---------------------------------------------------------------------------

const char* to_string(SessionType type) noexcept {
  switch (type) {
    case SessionType::cough_seated: return "cough_seated";
    case SessionType::cough_music: return "cough_music";
    case SessionType::cough_yoga_quiet: return "cough_yoga_quiet";
    case SessionType::cough_yoga_noisy: return "cough_yoga_noisy";
    case SessionType::cough_walking: return "cough_walking";
    case SessionType::speech: return "speech";
    case SessionType::laughing: return "laughing";
    case SessionType::head_motion: return "head_motion";
    case SessionType::drinking: return "drinking";
    case SessionType::eating: return "eating";
  }
  return "unknown";
}

std::optional<SessionType> parse_session_type(std::string_view name) noexcept {
  for (auto t : kAllSessionTypes) {
    if (name == to_string(t)) return t;
  }
  return std::nullopt;
}

bool is_cough_session(SessionType type) noexcept {
  switch (type) {
    case SessionType::cough_seated:
    case SessionType::cough_music:
    case SessionType::cough_yoga_quiet:
    case SessionType::cough_yoga_noisy:
    case SessionType::cough_walking:
      return true;
    default:
      return false;
  }
}

namespace {

Session read_session_csv(const fs::path& path, double sample_rate) {
  const std::string text = read_text_file(path);
  Session s;
  s.sample_rate = sample_rate;
  s.source = path.string();
  bool header_seen = false;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (trim(line).empty()) return;
    if (!header_seen) {
      if (trim(line) != "t,ax,ay,az") {
        throw ParseError(path.string() + ": expected header 't,ax,ay,az'", line_no);
      }
      header_seen = true;
      return;
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != 4) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) +
                           ": expected 4 fields",
                       line_no);
    }
    for (std::size_t f = 0; f < 4; ++f) {
      const auto v = parse_finite(fields[f]);
      if (!v) {
        throw ParseError(path.string() + " line " + std::to_string(line_no) + ": field " +
                             std::to_string(f + 1) + " is not a finite number",
                         line_no);
      }
      if (f > 0) s.channels[f - 1].push_back(*v);
    }
  });
  if (!header_seen) throw ParseError(path.string() + ": empty session file", 1);
  return s;
}

std::vector<double> read_annotations(const fs::path& path, double duration) {
  const std::string text = read_text_file(path);
  std::vector<double> centers;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (trim(line).empty()) return;
    const auto v = parse_finite(line);
    if (!v) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) +
                           ": not a finite timestamp",
                       line_no);
    }
    if (*v < 0.0 || *v > duration) {
      fail(ErrorKind::bounds, path.string() + " line " + std::to_string(line_no) +
                                  ": annotation " + format_double(*v) +
                                  " s lies outside the recording (" + format_double(duration) +
                                  " s)");
    }
    centers.push_back(*v);
  });
  return centers;
}

}  // namespace

std::vector<Session> load_sessions(const fs::path& manifest_path) {
  const std::string text = read_text_file(manifest_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest_path.string() + ": " + e.what(), e.byte);
  }
  if (!doc.is_array()) throw ParseError(manifest_path.string() + ": manifest must be an array", 0);

  const fs::path base = manifest_path.parent_path();
  std::vector<Session> sessions;
  for (const auto& entry : doc) {
    try {
      const fs::path rel = entry.at("path").get<std::string>();
      const double rate = entry.value("sample_rate", 50.0);
      if (!(rate > 0.0)) fail(ErrorKind::config, manifest_path.string() + ": sample_rate must be > 0");
      const auto type_name = entry.at("type").get<std::string>();
      const auto type = parse_session_type(type_name);
      if (!type) {
        fail(ErrorKind::config, manifest_path.string() + ": unknown session type '" + type_name + "'");
      }
      const fs::path csv = rel.is_absolute() ? rel : base / rel;
      if (!fs::exists(csv)) fail(ErrorKind::io, "missing session file " + csv.string());

      Session s = read_session_csv(csv, rate);
      s.subject_id = entry.at("subject").get<std::string>();
      s.type = *type;
      if (entry.contains("annotations") && !entry["annotations"].is_null()) {
        const fs::path ann_rel = entry["annotations"].get<std::string>();
        const fs::path ann = ann_rel.is_absolute() ? ann_rel : base / ann_rel;
        if (!fs::exists(ann)) fail(ErrorKind::io, "missing annotation file " + ann.string());
        s.cough_centers = read_annotations(ann, s.duration());
      }
      sessions.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(manifest_path.string() + ": " + e.what(), 0);
    }
  }
  return sessions;
}

fs::path save_sessions(const fs::path& dir, const std::vector<Session>& sessions) {
  nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const Session& s = sessions[i];
    const std::string stem = s.subject_id + "_" + to_string(s.type) + "_" + std::to_string(i);
    std::string csv = "t,ax,ay,az\n";
    for (std::size_t k = 0; k < s.length(); ++k) {
      csv += format_double(static_cast<double>(k) / s.sample_rate);
      for (const auto& ch : s.channels) {
        csv += ',';
        csv += format_double(ch[k]);
      }
      csv += '\n';
    }
    write_file_atomic(dir / (stem + ".csv"), csv);

    nlohmann::ordered_json entry;
    entry["path"] = stem + ".csv";
    entry["subject"] = s.subject_id;
    entry["type"] = to_string(s.type);
    entry["sample_rate"] = s.sample_rate;
    if (is_cough_session(s.type)) {
      std::string ann;
      for (double c : s.cough_centers) ann += format_double(c) + "\n";
      write_file_atomic(dir / (stem + ".txt"), ann);
      entry["annotations"] = stem + ".txt";
    } else {
      entry["annotations"] = nullptr;
    }
    manifest.push_back(std::move(entry));
  }
  const fs::path manifest_path = dir / "manifest.json";
  write_file_atomic(manifest_path, manifest.dump(2) + "\n");
  return manifest_path;
}

namespace {

struct SubjectTraits {
  double amplitude;             // cough burst scale
  double width;                 // burst time scale in seconds
  std::array<double, 3> gains;  // per-axis share of the burst
};

double session_seconds(SessionType type) { return type == SessionType::speech ? 60.0 : 30.0; }

// Biphasic burst: derivative-of-Gaussian normalised to unit peak, support
// about +-4 widths.
double burst(double dt, double width) {
  const double u = dt / width;
  if (std::abs(u) > 5.0) return 0.0;
  return u * std::exp(0.5 - 0.5 * u * u);
}

double bump(double dt, double width) {
  const double u = dt / width;
  if (std::abs(u) > 5.0) return 0.0;
  return std::exp(-0.5 * u * u);
}

Session synth_session(const std::string& subject, SessionType type, const SubjectTraits& traits,
                      std::size_t coughs, const SyntheticSessionOptions& opt,
                      std::mt19937_64& rng) {
  constexpr double pi = std::numbers::pi;
  const double rate = opt.sample_rate;
  const double sigma = opt.noise_std;
  const auto n = static_cast<std::size_t>(std::llround(session_seconds(type) * rate));
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  Session s;
  s.subject_id = subject;
  s.type = type;
  s.sample_rate = rate;
  const std::array<double, 3> offsets = {0.3 * sigma, -0.2 * sigma, 10.0 * sigma};
  for (std::size_t a = 0; a < 3; ++a) s.channels[a].assign(n, offsets[a]);

  auto add = [&](std::size_t axis, auto&& fn) {
    for (std::size_t k = 0; k < n; ++k) s.channels[axis][k] += fn(static_cast<double>(k) / rate);
  };

  double noise_scale = 1.0;
  const double phase = 2.0 * pi * u01(rng);
  switch (type) {
    case SessionType::cough_seated:
      break;
    case SessionType::cough_music:
      add(1, [&](double t) { return 1.5 * sigma * std::sin(2.0 * pi * 1.0 * t + phase); });
      break;
    case SessionType::cough_yoga_noisy:
      noise_scale = 1.5;
      [[fallthrough]];
    case SessionType::cough_yoga_quiet:
      for (std::size_t a = 0; a < 3; ++a) {
        add(a, [&](double t) { return 6.0 * sigma * std::sin(2.0 * pi * 0.15 * t + phase + a); });
      }
      break;
    case SessionType::cough_walking: {
      const double step = 1.0 / 1.8;
      for (double t0 = step * u01(rng); t0 < session_seconds(type); t0 += step) {
        add(2, [&](double t) { return 3.0 * sigma * bump(t - t0, 0.04); });
        add(1, [&](double t) { return 1.5 * sigma * bump(t - t0, 0.04); });
      }
      break;
    }
    case SessionType::speech:
      for (std::size_t a = 0; a < 3; ++a) {
        add(a, [&](double t) {
          const double envelope = 0.5 + 0.5 * std::sin(2.0 * pi * 0.7 * t + phase);
          return 0.8 * sigma * envelope * std::sin(2.0 * pi * 6.0 * t + a);
        });
      }
      break;
    case SessionType::laughing: {
      for (double t0 = 1.0 + 2.0 * u01(rng); t0 + 1.0 < session_seconds(type);
           t0 += 3.0 + 2.0 * u01(rng)) {
        add(0, [&](double t) {
          return (t >= t0 && t < t0 + 1.0) ? 2.0 * sigma * std::sin(2.0 * pi * 5.0 * (t - t0)) : 0.0;
        });
        add(1, [&](double t) {
          return (t >= t0 && t < t0 + 1.0) ? 1.2 * sigma * std::sin(2.0 * pi * 5.0 * (t - t0)) : 0.0;
        });
      }
      break;
    }
    case SessionType::head_motion:
      for (std::size_t a = 0; a < 3; ++a) {
        const double f = 0.3 + 0.5 * u01(rng);
        add(a, [&](double t) { return 5.0 * sigma * std::sin(2.0 * pi * f * t + phase * (a + 1)); });
      }
      break;
    case SessionType::drinking: {
      add(0, [&](double t) { return 4.0 * sigma * std::sin(2.0 * pi * 0.1 * t + phase); });
      for (double t0 = 2.0 + u01(rng); t0 + 1.0 < session_seconds(type); t0 += 3.0 + u01(rng)) {
        add(1, [&](double t) { return 2.0 * sigma * bump(t - t0, 0.15); });
      }
      break;
    }
    case SessionType::eating: {
      const double period = 1.0 / 1.5;
      for (double t0 = period * u01(rng); t0 < session_seconds(type); t0 += period) {
        add(2, [&](double t) { return 1.5 * sigma * bump(t - t0, 0.1); });
      }
      break;
    }
  }

  if (is_cough_session(type) && coughs > 0) {
    const double duration = session_seconds(type);
    const double edge = 0.5;
    const double slot = (duration - 2.0 * edge) / static_cast<double>(coughs);
    for (std::size_t c = 0; c < coughs; ++c) {
      const double jitter = (u01(rng) - 0.5) * 0.5 * slot;
      double center = edge + (static_cast<double>(c) + 0.5) * slot + jitter;
      center = std::round(center * rate) / rate;
      s.cough_centers.push_back(center);
      const double amp = opt.burst_amplitude * sigma * traits.amplitude * (0.85 + 0.3 * u01(rng));
      for (std::size_t a = 0; a < 3; ++a) {
        add(a, [&](double t) { return amp * traits.gains[a] * burst(t - center, traits.width); });
      }
    }
  }

  for (auto& ch : s.channels) {
    for (auto& v : ch) v += noise_scale * sigma * unit(rng);
  }
  return s;
}

}  // namespace

std::vector<Session> gen_synthetic_sessions(std::size_t n_subjects,
                                            std::size_t coughs_per_session,
                                            std::uint64_t seed,
                                            const SyntheticSessionOptions& options) {
  if (n_subjects < 2) fail(ErrorKind::domain, "gen_synthetic_sessions: need at least 2 subjects");
  if (!(options.sample_rate > 0.0) || !(options.noise_std > 0.0)) {
    fail(ErrorKind::domain, "gen_synthetic_sessions: sample rate and noise must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Session> sessions;
  for (std::size_t subj = 0; subj < n_subjects; ++subj) {
    char id[32];
    std::snprintf(id, sizeof id, "S%02zu", subj + 1);
    SubjectTraits traits;
    traits.amplitude = 0.8 + 0.4 * u01(rng);
    traits.width = 0.05 * (0.85 + 0.3 * u01(rng));
    traits.gains = {0.6 * (0.8 + 0.4 * u01(rng)), 1.0, 0.8 * (0.8 + 0.4 * u01(rng))};
    for (auto type : kAllSessionTypes) {
      sessions.push_back(synth_session(id, type, traits, coughs_per_session, options, rng));
    }
  }
  return sessions;
}

}  // namespace mcc::data

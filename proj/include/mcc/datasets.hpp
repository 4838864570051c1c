#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcc/core.hpp"

namespace mcc::data {

struct LabeledDataset {
  std::vector<Series> samples;
  std::vector<Label> labels;
  std::string provenance;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t count(Label label) const noexcept;
  std::vector<Series> of(Label label) const;
};

// ---------------------------------------------------------------------------
// Snowman: two isotropic 2-D Gaussians, body N((0,0), 3^2 I) and head
// N((0,3), 1^2 I). round(2n/3) samples come from the positive component.

enum class SnowmanComponent { body, head };

LabeledDataset gen_snowman(std::size_t n, SnowmanComponent positive = SnowmanComponent::body,
                           std::uint64_t seed = 7);

// ---------------------------------------------------------------------------
// UCR archive text format: one record per line, `label<sep>v1<sep>...<sep>vL`
// with sep = tab, comma, or runs of spaces (detected per line).

struct ClassMapping {
  std::set<std::string> positive;
  std::set<std::string> negative;
};

/// Canonical form of a class label: numeric labels print as integers when
/// integral ("1.0000000e+00" -> "1"), anything else is kept trimmed.
std::string normalize_label(std::string_view raw);

/// Records whose label is in neither set are dropped.
LabeledDataset parse_ucr(std::string_view text, const ClassMapping& mapping,
                         std::string provenance = {});
LabeledDataset load_ucr(const std::filesystem::path& path, const ClassMapping& mapping);

/// Writes comma-separated records with labels "1" (positive) and "0" (negative),
/// values in shortest round-trip form.
std::string format_ucr(const LabeledDataset& ds);
void save_ucr(const std::filesystem::path& path, const LabeledDataset& ds);

/// Stratified by label; each class keeps round(fraction * count) samples in the
/// training part. Relative sample order is preserved inside each part.
std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds,
                                                           double train_fraction,
                                                           std::uint64_t seed);

/// Stand-in for the UCR Trace problem when the archive file is unavailable:
/// positives are a shifted step with damped ringing, negatives a shifted
/// rectangular pulse, both with additive noise.
LabeledDataset gen_trace_like(std::size_t per_class, std::size_t length = 275,
                              std::uint64_t seed = 7);

// ---------------------------------------------------------------------------
// IMU sessions

enum class SessionType {
  cough_seated,
  cough_music,
  cough_yoga_quiet,
  cough_yoga_noisy,
  cough_walking,
  speech,
  laughing,
  head_motion,
  drinking,
  eating,
};

inline constexpr std::array<SessionType, 10> kAllSessionTypes = {
    SessionType::cough_seated,  SessionType::cough_music,  SessionType::cough_yoga_quiet,
    SessionType::cough_yoga_noisy, SessionType::cough_walking, SessionType::speech,
    SessionType::laughing,      SessionType::head_motion,  SessionType::drinking,
    SessionType::eating};

const char* to_string(SessionType type) noexcept;
std::optional<SessionType> parse_session_type(std::string_view name) noexcept;
bool is_cough_session(SessionType type) noexcept;

struct Session {
  std::string subject_id;
  SessionType type = SessionType::cough_seated;
  double sample_rate = 50.0;
  std::array<Series, 3> channels;    // ax, ay, az
  std::vector<double> cough_centers; // seconds, empty for non-cough sessions
  std::string source;                // file the session came from, if any

  std::size_t length() const noexcept { return channels[0].size(); }
  double duration() const noexcept {
    return static_cast<double>(length()) / sample_rate;
  }
};

/// Manifest: JSON array of {"path", "subject", "type", "annotations"} with
/// optional "sample_rate" (default 50). Relative paths resolve against the
/// manifest's directory. Session CSVs carry the header `t,ax,ay,az`;
/// annotation files hold one cough-center time in seconds per line.
std::vector<Session> load_sessions(const std::filesystem::path& manifest_path);

/// Writes one CSV (and annotation file for cough sessions) per session plus
/// `manifest.json` into `dir`. Returns the manifest path.
std::filesystem::path save_sessions(const std::filesystem::path& dir,
                                    const std::vector<Session>& sessions);

struct SyntheticSessionOptions {
  double noise_std = 1.0;
  /// Peak cough-burst amplitude as a multiple of noise_std.
  double burst_amplitude = 10.0;
  double sample_rate = 50.0;
};

/// Per subject, one session of every SessionType (speech 60 s, others 30 s).
std::vector<Session> gen_synthetic_sessions(std::size_t n_subjects,
                                            std::size_t coughs_per_session,
                                            std::uint64_t seed,
                                            const SyntheticSessionOptions& options = {});

}  // namespace mcc::data

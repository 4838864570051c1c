#include "mcc/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <limits>

#include <json.hpp>

#include "mcc/error.hpp"
#include "mcc/fileio.hpp"

namespace mcc {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kMagic[4] = {'M', 'C', 'C', '1'};

class ByteWriter {
 public:
  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw ParseError("model binary truncated at offset " + std::to_string(pos_), pos_);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::optional<Termination> parse_termination(const std::string& s) {
  for (auto t : {Termination::stop_reached, Termination::max_clusters,
                 Termination::no_splittable, Termination::stalled}) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

}  // namespace

std::string model_to_json(const MccModel& model) {
  ordered_json doc;
  doc["format"] = "mcc-model";
  doc["version"] = kModelJsonVersion;
  ordered_json metric;
  metric["kind"] = to_string(model.metric().kind);
  if (model.metric().kind == MetricKind::dtw && model.metric().dtw.band_radius) {
    metric["band_radius"] = *model.metric().dtw.band_radius;
  } else {
    metric["band_radius"] = nullptr;
  }
  doc["metric"] = std::move(metric);

  ordered_json templates = ordered_json::array();
  for (const auto& t : model.templates()) {
    ordered_json entry;
    entry["threshold"] = t.threshold;
    entry["centroid"] = t.centroid;
    templates.push_back(std::move(entry));
  }
  doc["templates"] = std::move(templates);

  const auto& m = model.metadata();
  ordered_json meta;
  meta["positives"] = m.positives;
  meta["negatives"] = m.negatives;
  meta["iterations"] = m.iterations;
  meta["final_cost"] = m.final_cost;
  meta["train_accuracy"] = m.train_accuracy;
  meta["termination"] = to_string(m.termination);
  doc["metadata"] = std::move(meta);
  return doc.dump(2) + "\n";
}

MccModel model_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model json: ") + e.what(), e.byte);
  }
  try {
    if (doc.at("format").get<std::string>() != "mcc-model") {
      fail(ErrorKind::version, "model json: not an mcc-model document");
    }
    const int version = doc.at("version").get<int>();
    if (version != kModelJsonVersion) {
      fail(ErrorKind::version, "model json: unsupported version " + std::to_string(version));
    }
    const auto& jm = doc.at("metric");
    const auto kind = parse_metric_kind(jm.at("kind").get<std::string>());
    if (!kind) throw ParseError("model json: unknown metric kind", 0);
    Metric metric{*kind, {}};
    if (*kind == MetricKind::dtw && jm.contains("band_radius") && !jm["band_radius"].is_null()) {
      metric.dtw.band_radius = jm["band_radius"].get<std::size_t>();
    }

    std::vector<Template> templates;
    for (const auto& jt : doc.at("templates")) {
      Template t;
      t.threshold = jt.at("threshold").get<double>();
      t.centroid = jt.at("centroid").get<std::vector<double>>();
      templates.push_back(std::move(t));
    }

    ModelMetadata meta;
    if (doc.contains("metadata")) {
      const auto& jmeta = doc["metadata"];
      meta.positives = jmeta.value("positives", std::size_t{0});
      meta.negatives = jmeta.value("negatives", std::size_t{0});
      meta.iterations = jmeta.value("iterations", std::size_t{0});
      meta.final_cost = jmeta.value("final_cost", 0.0);
      meta.train_accuracy = jmeta.value("train_accuracy", 0.0);
      const auto term = parse_termination(jmeta.value("termination", std::string("stop_reached")));
      if (!term) throw ParseError("model json: unknown termination value", 0);
      meta.termination = *term;
    }
    return MccModel(metric, std::move(templates), meta);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model json: ") + e.what(), 0);
  }
}

std::vector<std::uint8_t> model_to_binary(const MccModel& model) {
  ByteWriter w;
  w.raw(kMagic, sizeof kMagic);
  w.u8(kModelBinaryVersion);
  w.u8(model.metric().kind == MetricKind::dtw ? 1 : 0);
  const auto& band = model.metric().dtw.band_radius;
  w.i32(model.metric().kind == MetricKind::dtw && band ? static_cast<std::int32_t>(*band) : -1);
  w.u32(static_cast<std::uint32_t>(model.size()));
  for (const auto& t : model.templates()) {
    w.u32(static_cast<std::uint32_t>(t.centroid.size()));
    w.f32(static_cast<float>(t.threshold));
    for (double v : t.centroid) w.f32(static_cast<float>(v));
  }
  return w.take();
}

MccModel model_from_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    fail(ErrorKind::version, "model binary: bad magic bytes");
  }
  ByteReader r(bytes.subspan(sizeof kMagic));
  const std::uint8_t version = r.u8();
  if (version != kModelBinaryVersion) {
    fail(ErrorKind::version, "model binary: unsupported version " + std::to_string(version));
  }
  const std::uint8_t kind = r.u8();
  if (kind > 1) throw ParseError("model binary: unknown metric id", sizeof kMagic + 1);
  const std::int32_t band = r.i32();
  Metric metric = kind == 1 ? Metric::dynamic_time_warping() : Metric::euclidean();
  if (kind == 1 && band >= 0) metric.dtw.band_radius = static_cast<std::size_t>(band);

  const std::uint32_t count = r.u32();
  std::vector<Template> templates;
  templates.reserve(std::min<std::size_t>(count, r.remaining() / 8));
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::uint32_t len = r.u32();
    if (static_cast<std::size_t>(len) * 4 + 4 > r.remaining()) {
      throw ParseError("model binary: template length exceeds file size", sizeof kMagic + r.offset());
    }
    Template t;
    t.threshold = r.f32();
    t.centroid.resize(len);
    for (auto& v : t.centroid) v = r.f32();
    templates.push_back(std::move(t));
  }
  if (r.remaining() != 0) {
    throw ParseError("model binary: trailing bytes", sizeof kMagic + r.offset());
  }
  return MccModel(metric, std::move(templates));
}

ModelFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? ModelFormat::binary : ModelFormat::json;
}

void save_model(const MccModel& model, const std::filesystem::path& path, ModelFormat format) {
  if (format == ModelFormat::binary) {
    write_file_atomic(path, model_to_binary(model));
  } else {
    write_file_atomic(path, model_to_json(model));
  }
}

MccModel load_model(const std::filesystem::path& path) {
  const auto bytes = read_binary_file(path);
  const auto first = std::find_if(bytes.begin(), bytes.end(),
                                  [](std::uint8_t c) { return !std::isspace(c); });
  if (first != bytes.end() && *first == '{') {
    return model_from_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  return model_from_binary(bytes);
}

}  // namespace mcc

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcc/core.hpp"

namespace mcc {

enum class ModelFormat { json, binary };

inline constexpr int kModelJsonVersion = 1;
inline constexpr std::uint8_t kModelBinaryVersion = 1;

/// Canonical JSON text (.mcc.json). Identical models serialize to identical
/// bytes.
std::string model_to_json(const MccModel& model);
MccModel model_from_json(std::string_view text);

/// Compact format (.mcc.bin), little-endian:
///   "MCC1" | u8 version | u8 metric (0 euclidean, 1 dtw) | i32 band radius (-1 none)
///   | u32 template count | per template: u32 length, f32 threshold, f32 x length
/// Metadata is not stored.
std::vector<std::uint8_t> model_to_binary(const MccModel& model);
MccModel model_from_binary(std::span<const std::uint8_t> bytes);

ModelFormat format_for_path(const std::filesystem::path& path);

void save_model(const MccModel& model, const std::filesystem::path& path, ModelFormat format);

/// Detects the format from the leading bytes: "MCC1" is binary, anything
/// starting with '{' is JSON; other content is rejected as a version error.
MccModel load_model(const std::filesystem::path& path);

}  // namespace mcc

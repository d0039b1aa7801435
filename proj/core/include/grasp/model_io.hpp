#pragma once

#include "grasp/baselines.hpp"
#include "grasp/pipeline.hpp"

#include <filesystem>
#include <string>
#include <variant>

namespace grasp {

inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<PipelineModel, BaselineModel>;

/// JSON document with a versioned header and a CRC-32 over the payload.
std::string serialize_model(const AnyModel& model);
/// Throws FormatError for malformed or corrupted input, VersionMismatch for
/// files written by a newer format version.
AnyModel deserialize_model(std::string_view text, const std::string& source = "<memory>");

void save_model(const AnyModel& model, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);

}  // namespace grasp

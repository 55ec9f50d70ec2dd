#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "tsf/forest/forest.hpp"
#include "tsf/nn/model.hpp"
#include "tsf/transfer/structure.hpp"

// JSON documents for every fitted artifact. Each carries "format" and
// "format_version"; doubles are written in shortest round-trip form, so a
// save/load cycle reproduces predictions bit for bit. Schemas: docs/formats.md.

namespace tsf::io {

inline constexpr int kFormatVersion = 1;

std::string to_json(const Forest& forest);
std::string to_json(const StructureDistribution& dist);
std::string to_json(const DepthwiseDistribution& dp);
std::string to_json(const nn::NetworkModel& model);

Forest forest_from_json(const std::string& text);
StructureDistribution structure_distribution_from_json(const std::string& text);
DepthwiseDistribution depthwise_distribution_from_json(const std::string& text);
nn::NetworkModel network_model_from_json(const std::string& text);

using Artifact = std::variant<Forest, StructureDistribution, DepthwiseDistribution, nn::NetworkModel>;

// Dispatches on the "format" field. Throws std::runtime_error on unknown
// formats or versions.
Artifact artifact_from_json(const std::string& text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

Artifact load_artifact(const std::filesystem::path& path);
void save_artifact(const std::filesystem::path& path, const Artifact& artifact);

}  // namespace tsf::io

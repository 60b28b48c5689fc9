#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "iclscope/tensorstore/dataset.hpp"

namespace iclscope::tensorstore {

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr int kFormatVersion = 1;

// Writes manifest.json plus one headerless little-endian float32 blob per
// block. Output is byte-identical for equal datasets.
void write_dump(const Dataset& dataset, const std::filesystem::path& dir);

// Eager load; throws iclscope::Error on any validation error.
Dataset read_dump(const std::filesystem::path& dir);

std::string blob_name(const std::string& record_id, const std::string& kind, int layer);

// Little-endian float32 encode/decode, independent of host byte order.
std::string encode_floats(std::span<const float> values);
std::vector<float> decode_floats(const std::string& bytes);

}  // namespace iclscope::tensorstore

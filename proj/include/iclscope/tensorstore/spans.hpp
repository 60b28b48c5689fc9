#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "iclscope/tensorstore/dataset.hpp"

namespace iclscope::tensorstore {

// Built-in roles resolved from token provenance rather than segments.
inline constexpr const char* kRolePrompt = "prompt";
inline constexpr const char* kRoleResponse = "response";

// Sorted token indices whose character interval overlaps any target interval.
std::vector<std::size_t> tokens_overlapping(const PromptRecord& record,
                                            std::span<const Interval> targets);

std::vector<std::size_t> prompt_token_indices(const PromptRecord& record);
std::vector<std::size_t> response_token_indices(const PromptRecord& record);

// "prompt", "response", or a segment name. Throws kUnknownRole.
std::vector<std::size_t> resolve_role(const PromptRecord& record, const std::string& role);

// Intervals recorded for a segment. Throws kUnknownRole.
const std::vector<Interval>& segment_intervals(const PromptRecord& record, const std::string& role);

}  // namespace iclscope::tensorstore

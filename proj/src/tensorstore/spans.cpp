#include "iclscope/tensorstore/spans.hpp"

#include <numeric>

#include "iclscope/error.hpp"

namespace iclscope::tensorstore {

std::vector<std::size_t> tokens_overlapping(const PromptRecord& record,
                                            std::span<const Interval> targets) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < record.tokens.size(); ++i) {
    const Interval tok = record.tokens[i].span();
    for (const auto& target : targets) {
      if (tok.overlaps(target)) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

std::vector<std::size_t> prompt_token_indices(const PromptRecord& record) {
  std::vector<std::size_t> out(record.prompt_token_count);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::vector<std::size_t> response_token_indices(const PromptRecord& record) {
  std::vector<std::size_t> out;
  for (std::size_t i = record.prompt_token_count; i < record.tokens.size(); ++i) out.push_back(i);
  return out;
}

const std::vector<Interval>& segment_intervals(const PromptRecord& record, const std::string& role) {
  auto it = record.segments.find(role);
  if (it == record.segments.end()) {
    throw Error(ErrorCode::kUnknownRole, "record '" + record.id + "' has no segment '" + role + "'");
  }
  return it->second;
}

std::vector<std::size_t> resolve_role(const PromptRecord& record, const std::string& role) {
  if (role == kRolePrompt) return prompt_token_indices(record);
  if (role == kRoleResponse) return response_token_indices(record);
  return tokens_overlapping(record, segment_intervals(record, role));
}

}  // namespace iclscope::tensorstore

#include "iclscope/tensorstore/dataset.hpp"

#include <algorithm>
#include <set>

#include "iclscope/error.hpp"
#include "iclscope/text.hpp"

namespace iclscope::tensorstore {

std::size_t PromptRecord::full_length() const {
  return text::codepoint_length(prompt_text) + text::codepoint_length(response_text);
}

std::size_t PromptRecord::prompt_length() const { return text::codepoint_length(prompt_text); }

std::optional<std::string> PromptRecord::label(const std::string& key) const {
  auto it = labels.find(key);
  if (it == labels.end()) return std::nullopt;
  return it->second;
}

const PromptRecord* Dataset::find_record(const std::string& id) const {
  auto it = std::find_if(records.begin(), records.end(),
                         [&](const PromptRecord& r) { return r.id == id; });
  return it == records.end() ? nullptr : &*it;
}

const PromptRecord& Dataset::record(const std::string& id) const {
  if (const auto* r = find_record(id)) return *r;
  throw Error(ErrorCode::kInvalidArgument, "unknown record id '" + id + "'");
}

const EmbeddingBlock* Dataset::embedding(const std::string& id, int layer) const {
  auto it = embeddings.find({id, layer});
  return it == embeddings.end() ? nullptr : &it->second;
}

const AttentionBlock* Dataset::attention_at(const std::string& id, int layer) const {
  auto it = attention.find({id, layer});
  return it == attention.end() ? nullptr : &it->second;
}

std::vector<int> Dataset::layers() const {
  std::set<int> all;
  for (const auto& r : records) all.insert(r.layer_ids.begin(), r.layer_ids.end());
  return {all.begin(), all.end()};
}

void Dataset::add_embedding(EmbeddingBlock block) {
  BlockKey key{block.record_id, block.layer};
  embeddings.insert_or_assign(std::move(key), std::move(block));
}

void Dataset::add_attention(AttentionBlock block) {
  BlockKey key{block.record_id, block.layer};
  attention.insert_or_assign(std::move(key), std::move(block));
}

std::size_t expected_embedding_rows(const PromptRecord& record, EmbeddingScope scope) {
  return scope == EmbeddingScope::kPromptOnly ? record.prompt_token_count : record.tokens.size();
}

std::string to_string(EmbeddingScope scope) {
  return scope == EmbeddingScope::kPromptOnly ? "prompt_only" : "full";
}

EmbeddingScope parse_embedding_scope(const std::string& text) {
  if (text == "full") return EmbeddingScope::kFull;
  if (text == "prompt_only") return EmbeddingScope::kPromptOnly;
  throw Error(ErrorCode::kMalformedManifest, "unknown embedding_scope '" + text + "'");
}

}  // namespace iclscope::tensorstore

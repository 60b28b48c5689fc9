#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace iclscope::tensorstore {

// Half-open interval of code point offsets into x = prompt_text + response_text.
struct Interval {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool overlaps(const Interval& other) const {
    return start < other.end && other.start < end;
  }
  bool operator==(const Interval&) const = default;
};

struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  Interval span() const { return {start, end}; }
  bool operator==(const Token&) const = default;
};

struct PromptRecord {
  std::string id;
  std::string prompt_text;
  std::string response_text;
  std::vector<Token> tokens;
  std::size_t prompt_token_count = 0;
  std::map<std::string, std::vector<Interval>> segments;
  std::map<std::string, std::string> labels;
  std::vector<int> layer_ids;

  std::string full_text() const { return prompt_text + response_text; }
  std::size_t full_length() const;
  std::size_t prompt_length() const;

  // Label lookup; nullopt when absent.
  std::optional<std::string> label(const std::string& key) const;

  bool operator==(const PromptRecord&) const = default;
};

enum class EmbeddingScope { kFull, kPromptOnly };

// Row-major n_tokens x dim matrix of float32 token embeddings.
struct EmbeddingBlock {
  std::string record_id;
  int layer = 0;
  std::size_t n_tokens = 0;
  std::size_t dim = 0;
  std::vector<float> values;

  float at(std::size_t token, std::size_t j) const { return values[token * dim + j]; }
  std::span<const float> row(std::size_t token) const {
    return {values.data() + token * dim, dim};
  }
  bool operator==(const EmbeddingBlock&) const = default;
};

// heads x n x n tensor, rows = attending token, columns = attended token.
struct AttentionBlock {
  std::string record_id;
  int layer = 0;
  std::size_t heads = 0;
  std::size_t n = 0;
  std::vector<float> values;

  float at(std::size_t head, std::size_t i, std::size_t j) const {
    return values[(head * n + i) * n + j];
  }
  float& at(std::size_t head, std::size_t i, std::size_t j) {
    return values[(head * n + i) * n + j];
  }
  bool operator==(const AttentionBlock&) const = default;
};

struct DumpMetadata {
  std::string model;
  std::size_t d = 0;
  std::size_t h = 0;
  std::uint64_t seed = 0;
  EmbeddingScope embedding_scope = EmbeddingScope::kFull;

  bool operator==(const DumpMetadata&) const = default;
};

using BlockKey = std::pair<std::string, int>;

struct Dataset {
  DumpMetadata metadata;
  std::vector<PromptRecord> records;
  std::map<BlockKey, EmbeddingBlock> embeddings;
  std::map<BlockKey, AttentionBlock> attention;

  const PromptRecord* find_record(const std::string& id) const;
  const PromptRecord& record(const std::string& id) const;
  const EmbeddingBlock* embedding(const std::string& id, int layer) const;
  const AttentionBlock* attention_at(const std::string& id, int layer) const;

  // Sorted union of layer ids across records.
  std::vector<int> layers() const;

  void add_embedding(EmbeddingBlock block);
  void add_attention(AttentionBlock block);

  bool operator==(const Dataset&) const = default;
};

// Number of embedding rows a record must have under the given scope.
std::size_t expected_embedding_rows(const PromptRecord& record, EmbeddingScope scope);

std::string to_string(EmbeddingScope scope);
EmbeddingScope parse_embedding_scope(const std::string& text);

}  // namespace iclscope::tensorstore

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iclscope/stats/mantel.hpp"
#include "iclscope/tensorstore/dataset.hpp"

namespace iclscope::repgeom {

enum class Pooling { kMax, kMean };

Pooling parse_pooling(const std::string& text);
const char* to_string(Pooling pooling);

// Which token rows feed a prompt vector.
struct TokenSelection {
  enum class Kind {
    kAllPromptTokens,
    kSegment,      // every interval of a role
    kLastSegment,  // only the last interval of a role (node mentions)
  };
  Kind kind = Kind::kAllPromptTokens;
  std::string role;

  static TokenSelection all_prompt_tokens() { return {}; }
  static TokenSelection segment(std::string role) { return {Kind::kSegment, std::move(role)}; }
  static TokenSelection last_segment(std::string role) {
    return {Kind::kLastSegment, std::move(role)};
  }

  std::string describe() const;
};

// Parses "all", "segment:<role>" or "last:<role>".
TokenSelection parse_selection(const std::string& text);

struct PromptVector {
  std::string record_id;
  int layer = 0;
  Eigen::VectorXd vector;
  Pooling pooling = Pooling::kMax;
  TokenSelection selection;
};

// Token rows selected for a record, checked against the block's row count.
std::vector<std::size_t> resolve_selection(const tensorstore::PromptRecord& record,
                                           const TokenSelection& selection, std::size_t n_rows);

Eigen::VectorXd pool_rows(const tensorstore::EmbeddingBlock& block,
                          std::span<const std::size_t> rows, Pooling method);

PromptVector pool_tokens(const tensorstore::EmbeddingBlock& block,
                         const tensorstore::PromptRecord& record, const TokenSelection& selection,
                         Pooling method);

inline constexpr double kStdFloor = 1e-8;

// Per-dimension z-score across the set using the population std.
std::vector<PromptVector> standardize(const std::vector<PromptVector>& vectors);

// Standardizes each group on its own, or all groups with shared statistics.
std::vector<std::vector<PromptVector>> standardize_groups(
    const std::vector<std::vector<PromptVector>>& groups, bool joint);

struct SimilarityMatrix {
  std::vector<std::string> order;
  Eigen::MatrixXd values;
};

SimilarityMatrix cosine_similarity_matrix(const std::vector<PromptVector>& vectors);

enum class HypothesisKind { kLabelEquality, kCombined, kSuccessorRepresentation, kCustom };
const char* to_string(HypothesisKind kind);

struct HypothesisMatrix {
  std::vector<std::string> order;
  Eigen::MatrixXd values;
  HypothesisKind kind = HypothesisKind::kCustom;
};

HypothesisMatrix hypothesis_from_labels(std::span<const tensorstore::PromptRecord* const> records,
                                        const std::string& label_key);

// Binary label-equality hypothesis over arbitrary items.
HypothesisMatrix hypothesis_from_values(std::vector<std::string> order,
                                        std::span<const std::string> values);

// Elementwise average of two hypotheses over the same order.
HypothesisMatrix hypothesis_combined(const HypothesisMatrix& h1, const HypothesisMatrix& h2);

// Wraps a precomputed matrix after checking symmetry and the [0,1] range.
HypothesisMatrix hypothesis_from_matrix(std::vector<std::string> order, Eigen::MatrixXd values,
                                        HypothesisKind kind);

// Correlation between the strictly-upper triangles of M and H.
double hypothesis_alignment(const SimilarityMatrix& M, const HypothesisMatrix& H,
                            stats::CorrelationMethod method = stats::CorrelationMethod::kPearson);

}  // namespace iclscope::repgeom

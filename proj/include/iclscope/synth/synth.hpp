#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "iclscope/tensorstore/dataset.hpp"

namespace iclscope::synth {

struct PlantedEmbeddingSpec {
  std::vector<std::string> labels;  // one per sample
  std::size_t d = 16;
  double signal = 5.0;  // centroid norm
  double noise = 1.0;   // isotropic std
  std::uint64_t seed = 0;
};

// Unit vector drawn from a Gaussian stream keyed by the label's FNV-1a hash.
Eigen::VectorXd class_direction(const std::string& label, std::size_t d);

// Row i = signal * class_direction(labels[i]) + noise * N(0, I), noise keyed by (seed, i).
Eigen::MatrixXd synth_embeddings(const PlantedEmbeddingSpec& spec);

struct PlantedAttentionSpec {
  std::size_t n_total = 0;
  std::vector<std::size_t> response_rows;
  std::vector<std::size_t> focus_cols;  // disjoint from response_rows
  double focus_mass = 0.5;
  std::size_t heads = 1;
  std::uint64_t seed = 0;
  std::string record_id;
  int layer = 0;

  // Contiguous half-open token ranges.
  static PlantedAttentionSpec from_ranges(std::size_t n_total, std::size_t response_begin,
                                          std::size_t response_end, std::size_t focus_begin,
                                          std::size_t focus_end, double focus_mass,
                                          std::size_t heads, std::uint64_t seed);
};

// Relative per-entry noise. Planted rows still carry exactly focus_mass on the focus columns.
inline constexpr double kHeadJitter = 0.01;

tensorstore::AttentionBlock synth_attention(const PlantedAttentionSpec& spec);

// Each token is optional leading whitespace followed by a run of word characters
// or one other character. Trailing whitespace becomes its own token.
// Offsets are code points, shifted by `offset`.
std::vector<tensorstore::Token> simple_tokenize(std::string_view text, std::size_t offset = 0);

// Settings for turning prompt records into a full synthetic dump.
struct SynthDumpSpec {
  std::vector<int> layers{0, 1, 2};
  std::size_t d = 16;
  std::size_t heads = 2;
  std::string label_key;  // planted class label; empty plants a single class
  double signal = 5.0;
  double noise = 1.0;
  std::string focus_role;  // segment the response attends to; empty gives uniform rows
  double focus_mass = 0.8;  // non-positive leaves the record's rows uniform
  // When `focus_label` is set, records whose label value appears in the map use that mass.
  std::string focus_label;
  std::map<std::string, double> focus_mass_by_value;
  std::uint64_t seed = 0;
  tensorstore::EmbeddingScope scope = tensorstore::EmbeddingScope::kFull;
  std::string model = "synth";
};

// Fills tokens, prompt_token_count and layer_ids of each skeleton record, then plants
// embeddings and attention for every layer.
tensorstore::Dataset synth_dataset(std::vector<tensorstore::PromptRecord> skeletons,
                                   const SynthDumpSpec& spec);

}  // namespace iclscope::synth

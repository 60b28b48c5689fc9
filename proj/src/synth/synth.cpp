#include "iclscope/synth/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "iclscope/error.hpp"
#include "iclscope/rng.hpp"
#include "iclscope/tensorstore/spans.hpp"
#include "iclscope/text.hpp"

namespace iclscope::synth {

namespace ts = iclscope::tensorstore;

Eigen::VectorXd class_direction(const std::string& label, std::size_t d) {
  Rng rng(fnv1a64(label));
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng.gaussian();
  return v / v.norm();
}

Eigen::MatrixXd synth_embeddings(const PlantedEmbeddingSpec& spec) {
  if (spec.d < 2) throw Error(ErrorCode::kInvalidArgument, "planted embeddings need d >= 2");
  if (spec.signal < 0.0 || spec.noise < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "signal and noise must be >= 0");
  }
  const auto m = static_cast<Eigen::Index>(spec.labels.size());
  const auto d = static_cast<Eigen::Index>(spec.d);
  // Centroid directions are Gram-Schmidt orthonormalized in sorted label order
  // while the class count fits in d; beyond that they stay hash directions.
  std::map<std::string, Eigen::VectorXd> centroids;
  for (const auto& label : spec.labels) centroids.emplace(label, class_direction(label, spec.d));
  if (centroids.size() <= spec.d) {
    std::vector<Eigen::VectorXd> basis;
    for (auto& [label, v] : centroids) {
      for (const auto& b : basis) v -= v.dot(b) * b;
      v.normalize();
      basis.push_back(v);
    }
  }
  Eigen::MatrixXd X(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::VectorXd& centroid = centroids.at(spec.labels[static_cast<std::size_t>(i)]);
    Rng rng(spec.seed, static_cast<std::uint64_t>(i));
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = spec.signal * centroid(j) + spec.noise * rng.gaussian();
  }
  return X;
}

PlantedAttentionSpec PlantedAttentionSpec::from_ranges(std::size_t n_total, std::size_t response_begin,
                                                       std::size_t response_end, std::size_t focus_begin,
                                                       std::size_t focus_end, double focus_mass,
                                                       std::size_t heads, std::uint64_t seed) {
  PlantedAttentionSpec spec;
  spec.n_total = n_total;
  for (std::size_t i = response_begin; i < response_end; ++i) spec.response_rows.push_back(i);
  for (std::size_t j = focus_begin; j < focus_end; ++j) spec.focus_cols.push_back(j);
  spec.focus_mass = focus_mass;
  spec.heads = heads;
  spec.seed = seed;
  return spec;
}

ts::AttentionBlock synth_attention(const PlantedAttentionSpec& spec) {
  const std::size_t n = spec.n_total;
  if (n == 0 || spec.heads == 0) throw Error(ErrorCode::kInvalidArgument, "attention needs n >= 1 and h >= 1");
  std::vector<char> is_focus(n, 0), is_response(n, 0);
  for (std::size_t j : spec.focus_cols) {
    if (j >= n) throw Error(ErrorCode::kInvalidArgument, "focus index out of range");
    is_focus[j] = 1;
  }
  for (std::size_t i : spec.response_rows) {
    if (i >= n) throw Error(ErrorCode::kInvalidArgument, "response index out of range");
    if (is_focus[i]) throw Error(ErrorCode::kInvalidArgument, "response and focus ranges overlap");
    is_response[i] = 1;
  }
  const auto n_focus = static_cast<std::size_t>(std::count(is_focus.begin(), is_focus.end(), 1));
  const bool planted = n_focus > 0 && n_focus < n;
  if (planted && !(spec.focus_mass > 0.0 && spec.focus_mass < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focus_mass must lie in (0,1)");
  }

  // Base row profiles before jitter.
  std::vector<double> uniform_row(n, 1.0 / static_cast<double>(n));
  std::vector<double> focus_row = uniform_row;
  if (planted) {
    const double on = spec.focus_mass / static_cast<double>(n_focus);
    const double off = (1.0 - spec.focus_mass) / static_cast<double>(n - n_focus);
    for (std::size_t j = 0; j < n; ++j) focus_row[j] = is_focus[j] ? on : off;
  }

  // Planted rows are renormalized within the focus and non-focus column groups
  // separately, so jitter never moves mass across the plant boundary.
  ts::AttentionBlock block{spec.record_id, spec.layer, spec.heads, n, std::vector<float>(spec.heads * n * n)};
  std::vector<double> row(n);
  for (std::size_t h = 0; h < spec.heads; ++h) {
    Rng rng(spec.seed, h);
    for (std::size_t i = 0; i < n; ++i) {
      const bool focus_row_i = is_response[i] && planted;
      const auto& base = focus_row_i ? focus_row : uniform_row;
      double sum_in = 0.0, sum_out = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = base[j] * (1.0 + kHeadJitter * rng.uniform(-1.0, 1.0));
        (focus_row_i && is_focus[j] ? sum_in : sum_out) += row[j];
      }
      const double mass_in = focus_row_i ? spec.focus_mass : 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double v = focus_row_i && is_focus[j] ? row[j] / sum_in * mass_in : row[j] / sum_out * (1.0 - mass_in);
        block.at(h, i, j) = static_cast<float>(v);
      }
    }
  }
  return block;
}

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_word(unsigned char c) { return std::isalnum(c) != 0 || c == '_' || c >= 0x80; }

// Byte length of the UTF-8 sequence starting at `i`.
std::size_t cp_bytes(std::string_view s, std::size_t i) {
  std::size_t k = 1;
  while (i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80) ++k;
  return k;
}

}  // namespace

std::vector<ts::Token> simple_tokenize(std::string_view text, std::size_t offset) {
  std::vector<ts::Token> out;
  std::size_t i = 0;
  std::size_t cp = offset;
  auto advance = [&](std::size_t& pos, std::size_t& cps) {
    pos += cp_bytes(text, pos);
    ++cps;
  };
  while (i < text.size()) {
    const std::size_t begin = i;
    const std::size_t cp_begin = cp;
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) advance(i, cp);
    if (i < text.size()) {
      if (is_word(static_cast<unsigned char>(text[i]))) {
        while (i < text.size() && is_word(static_cast<unsigned char>(text[i]))) advance(i, cp);
      } else {
        advance(i, cp);
      }
    }
    out.push_back({std::string(text.substr(begin, i - begin)), cp_begin, cp});
  }
  return out;
}

namespace {

double focus_mass_for(const ts::PromptRecord& record, const SynthDumpSpec& spec) {
  if (spec.focus_label.empty()) return spec.focus_mass;
  const auto value = record.label(spec.focus_label);
  if (!value) return spec.focus_mass;
  const auto it = spec.focus_mass_by_value.find(*value);
  return it == spec.focus_mass_by_value.end() ? spec.focus_mass : it->second;
}

}  // namespace

ts::Dataset synth_dataset(std::vector<ts::PromptRecord> skeletons, const SynthDumpSpec& spec) {
  if (spec.layers.empty()) throw Error(ErrorCode::kInvalidArgument, "synthetic dump needs at least one layer");
  if (spec.d < 2 || spec.heads < 1) throw Error(ErrorCode::kInvalidArgument, "synthetic dump needs d >= 2, h >= 1");

  ts::Dataset ds;
  ds.metadata = {spec.model, spec.d, spec.heads, spec.seed, spec.scope};
  std::vector<int> layers = spec.layers;
  std::sort(layers.begin(), layers.end());
  layers.erase(std::unique(layers.begin(), layers.end()), layers.end());

  std::sort(skeletons.begin(), skeletons.end(),
            [](const ts::PromptRecord& a, const ts::PromptRecord& b) { return a.id < b.id; });
  for (std::size_t r = 0; r < skeletons.size(); ++r) {
    ts::PromptRecord record = std::move(skeletons[r]);
    record.tokens = simple_tokenize(record.prompt_text);
    record.prompt_token_count = record.tokens.size();
    auto response = simple_tokenize(record.response_text, text::codepoint_length(record.prompt_text));
    record.tokens.insert(record.tokens.end(), response.begin(), response.end());
    record.layer_ids = layers;

    const std::string class_label =
        spec.label_key.empty() ? std::string("all") : record.label(spec.label_key).value_or("");
    const Eigen::VectorXd centroid = spec.signal * class_direction(class_label, spec.d);
    // Tokens inside node:<label> segments carry that node's own direction.
    std::vector<const Eigen::VectorXd*> row_centroid(record.tokens.size(), &centroid);
    std::map<std::string, Eigen::VectorXd> node_centroids;
    for (const auto& [role, intervals] : record.segments) {
      if (!role.starts_with("node:")) continue;
      auto& c = node_centroids[role] = spec.signal * class_direction(role, spec.d);
      for (std::size_t t : ts::tokens_overlapping(record, intervals)) row_centroid[t] = &c;
    }

    const std::size_t rows = ts::expected_embedding_rows(record, spec.scope);
    const std::uint64_t record_key = derive_key(spec.seed, r);
    const auto response_rows = ts::response_token_indices(record);
    std::vector<std::size_t> focus_cols;
    if (!spec.focus_role.empty() && record.segments.count(spec.focus_role)) {
      focus_cols = ts::resolve_role(record, spec.focus_role);
      std::erase_if(focus_cols, [&](std::size_t j) { return j >= record.prompt_token_count; });
    }

    for (std::size_t li = 0; li < layers.size(); ++li) {
      ts::EmbeddingBlock emb{record.id, layers[li], rows, spec.d, std::vector<float>(rows * spec.d)};
      Rng rng(derive_key(record_key, 2 * li));
      for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t j = 0; j < spec.d; ++j) {
          emb.values[t * spec.d + j] =
              static_cast<float>((*row_centroid[t])(static_cast<Eigen::Index>(j)) + spec.noise * rng.gaussian());
        }
      }
      ds.add_embedding(std::move(emb));

      PlantedAttentionSpec att;
      att.n_total = record.tokens.size();
      att.response_rows = response_rows;
      att.focus_mass = focus_mass_for(record, spec);
      if (att.focus_mass > 0.0) att.focus_cols = focus_cols;
      att.heads = spec.heads;
      att.seed = derive_key(record_key, 2 * li + 1);
      att.record_id = record.id;
      att.layer = layers[li];
      ds.add_attention(synth_attention(att));
    }
    ds.records.push_back(std::move(record));
  }
  return ds;
}

}  // namespace iclscope::synth

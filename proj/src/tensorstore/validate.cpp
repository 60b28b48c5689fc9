#include "iclscope/tensorstore/validate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace iclscope::tensorstore {

namespace {

bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  for (unsigned char c : id) {
    if (!(std::isalnum(c) || c == '_' || c == '-')) return false;
  }
  return true;
}

void check_record(const PromptRecord& r, ValidationReport& report) {
  auto error = [&](std::string msg) {
    report.errors.push_back({ErrorCode::kInvariantViolation, r.id, std::move(msg), {}, {}, {}, {}});
  };
  if (!valid_id(r.id)) error("record id must be non-empty and use only [A-Za-z0-9_-]");

  const std::size_t len_x = r.full_length();
  const std::size_t len_p = r.prompt_length();
  for (std::size_t i = 0; i < r.tokens.size(); ++i) {
    const Token& t = r.tokens[i];
    if (t.start > t.end || t.end > len_x) {
      std::ostringstream os;
      os << "token " << i << " interval [" << t.start << "," << t.end << ") outside [0," << len_x << ")";
      error(os.str());
    }
    if (i > 0 && t.start < r.tokens[i - 1].end) {
      std::ostringstream os;
      os << "token " << i << " overlaps or precedes token " << i - 1;
      error(os.str());
    }
    if (i < r.prompt_token_count && t.end > len_p) {
      std::ostringstream os;
      os << "prompt token " << i << " ends at " << t.end << " past prompt length " << len_p;
      error(os.str());
    }
  }
  if (r.prompt_token_count > r.tokens.size()) {
    error("prompt_token_count " + std::to_string(r.prompt_token_count) + " exceeds token count " +
          std::to_string(r.tokens.size()));
  }
  for (const auto& [role, intervals] : r.segments) {
    for (const auto& iv : intervals) {
      if (iv.start > iv.end || iv.end > len_x) {
        std::ostringstream os;
        os << "segment '" << role << "' interval [" << iv.start << "," << iv.end << ") outside [0,"
           << len_x << ")";
        error(os.str());
      }
    }
  }
  std::set<int> seen;
  for (int layer : r.layer_ids) {
    if (!seen.insert(layer).second) error("duplicate layer id " + std::to_string(layer));
  }
}

}  // namespace

ValidationReport validate_dataset(const Dataset& dataset) {
  ValidationReport report;
  const auto& meta = dataset.metadata;

  std::set<std::string> ids;
  for (const auto& r : dataset.records) {
    if (!ids.insert(r.id).second) {
      report.errors.push_back(
          {ErrorCode::kDuplicateRecord, r.id, "duplicate record id", {}, {}, {}, {}});
    }
    check_record(r, report);
  }

  std::map<std::string, std::set<int>> block_layers;
  auto dangling = [&](const std::string& id, int layer) {
    report.errors.push_back(
        {ErrorCode::kDanglingIndex, id, "dangling index entry: no record with this id", layer, {}, {}, {}});
  };
  auto layer_check = [&](const PromptRecord& r, int layer) {
    block_layers[r.id].insert(layer);
    if (std::find(r.layer_ids.begin(), r.layer_ids.end(), layer) == r.layer_ids.end()) {
      report.errors.push_back({ErrorCode::kInvariantViolation, r.id,
                               "block at layer " + std::to_string(layer) + " not listed in layer_ids",
                               layer, {}, {}, {}});
    }
  };

  for (const auto& [key, block] : dataset.embeddings) {
    const PromptRecord* r = dataset.find_record(block.record_id);
    if (key.first != block.record_id || key.second != block.layer) {
      report.errors.push_back({ErrorCode::kInvariantViolation, block.record_id,
                               "embedding index key disagrees with block", block.layer, {}, {}, {}});
    }
    if (r == nullptr) {
      dangling(block.record_id, block.layer);
      continue;
    }
    layer_check(*r, block.layer);
    const std::size_t rows = expected_embedding_rows(*r, meta.embedding_scope);
    if (block.n_tokens != rows || block.dim != meta.d ||
        block.values.size() != block.n_tokens * block.dim) {
      std::ostringstream os;
      os << "embedding shape [" << block.n_tokens << "," << block.dim << "] (" << block.values.size()
         << " values) but expected [" << rows << "," << meta.d << "]";
      report.errors.push_back(
          {ErrorCode::kShapeMismatch, r->id, os.str(), block.layer, {}, {}, {}});
    }
  }

  for (const auto& [key, block] : dataset.attention) {
    const PromptRecord* r = dataset.find_record(block.record_id);
    if (key.first != block.record_id || key.second != block.layer) {
      report.errors.push_back({ErrorCode::kInvariantViolation, block.record_id,
                               "attention index key disagrees with block", block.layer, {}, {}, {}});
    }
    if (r == nullptr) {
      dangling(block.record_id, block.layer);
      continue;
    }
    layer_check(*r, block.layer);
    if (block.n != r->tokens.size() || block.heads != meta.h ||
        block.values.size() != block.heads * block.n * block.n) {
      std::ostringstream os;
      os << "attention shape [" << block.heads << "," << block.n << "," << block.n
         << "] but expected [" << meta.h << "," << r->tokens.size() << "," << r->tokens.size() << "]";
      report.errors.push_back(
          {ErrorCode::kShapeMismatch, r->id, os.str(), block.layer, {}, {}, {}});
      continue;
    }
    for (std::size_t h = 0; h < block.heads; ++h) {
      for (std::size_t i = 0; i < block.n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < block.n; ++j) sum += block.at(h, i, j);
        if (!(std::abs(sum - 1.0) <= kAttentionRowTolerance)) {
          std::ostringstream os;
          os << "attention row sums to " << sum;
          report.warnings.push_back(
              {ErrorCode::kInvariantViolation, r->id, os.str(), block.layer, h, i, {}});
        }
      }
    }
  }

  for (const auto& r : dataset.records) {
    for (int layer : r.layer_ids) {
      if (!block_layers[r.id].contains(layer)) {
        report.errors.push_back({ErrorCode::kInvariantViolation, r.id,
                                 "layer " + std::to_string(layer) + " listed but no block present",
                                 layer, {}, {}, {}});
      }
    }
  }
  return report;
}

std::string describe(const Finding& f, bool with_code) {
  std::ostringstream os;
  if (with_code) os << error_code_name(f.code) << ' ';
  if (!f.file.empty()) os << "file=" << f.file << ' ';
  if (!f.record_id.empty()) os << "record=" << f.record_id << ' ';
  if (f.layer) os << "layer=" << *f.layer << ' ';
  if (f.head) os << "head=" << *f.head << ' ';
  if (f.row) os << "row=" << *f.row << ' ';
  std::string head = os.str();
  if (!head.empty()) head.back() = ':';
  return head.empty() ? f.message : head + " " + f.message;
}

nlohmann::json ValidationReport::to_json() const {
  auto encode = [](const std::vector<Finding>& findings) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : findings) {
      nlohmann::json j;
      j["code"] = std::string(error_code_name(f.code));
      j["record_id"] = f.record_id;
      j["message"] = f.message;
      if (f.layer) j["layer"] = *f.layer;
      if (f.head) j["head"] = *f.head;
      if (f.row) j["row"] = *f.row;
      if (!f.file.empty()) j["file"] = f.file;
      arr.push_back(std::move(j));
    }
    return arr;
  };
  return {{"errors", encode(errors)}, {"warnings", encode(warnings)}, {"ok", ok()}};
}

}  // namespace iclscope::tensorstore

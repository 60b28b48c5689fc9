#include "iclscope/tensorstore/dump_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iclscope/error.hpp"
#include "iclscope/tensorstore/validate.hpp"

namespace iclscope::tensorstore {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct BlockEntry {
  std::string record_id;
  std::string kind;
  int layer = 0;
  std::vector<std::size_t> shape;
  std::string file;
};

json record_to_json(const PromptRecord& r) {
  json tokens = json::array();
  for (const auto& t : r.tokens) tokens.push_back(json::array({t.text, t.start, t.end}));
  json segments = json::object();
  for (const auto& [role, intervals] : r.segments) {
    json arr = json::array();
    for (const auto& iv : intervals) arr.push_back(json::array({iv.start, iv.end}));
    segments[role] = std::move(arr);
  }
  return {{"id", r.id},
          {"prompt_text", r.prompt_text},
          {"response_text", r.response_text},
          {"tokens", std::move(tokens)},
          {"prompt_token_count", r.prompt_token_count},
          {"segments", std::move(segments)},
          {"labels", r.labels},
          {"layer_ids", r.layer_ids}};
}

PromptRecord record_from_json(const json& j) {
  PromptRecord r;
  r.id = j.at("id").get<std::string>();
  r.prompt_text = j.at("prompt_text").get<std::string>();
  r.response_text = j.at("response_text").get<std::string>();
  for (const auto& t : j.at("tokens")) {
    r.tokens.push_back({t.at(0).get<std::string>(), t.at(1).get<std::size_t>(), t.at(2).get<std::size_t>()});
  }
  r.prompt_token_count = j.at("prompt_token_count").get<std::size_t>();
  for (const auto& [role, arr] : j.at("segments").items()) {
    auto& out = r.segments[role];
    for (const auto& iv : arr) out.push_back({iv.at(0).get<std::size_t>(), iv.at(1).get<std::size_t>()});
  }
  r.labels = j.at("labels").get<std::map<std::string, std::string>>();
  r.layer_ids = j.at("layer_ids").get<std::vector<int>>();
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + p.string());
}

// Loads everything that can be loaded, recording file-level problems.
Dataset load(const fs::path& dir, ValidationReport& report) {
  Dataset ds;
  auto fail = [&](ErrorCode code, std::string msg, std::string file = {}) {
    Finding f;
    f.code = code;
    f.message = std::move(msg);
    f.file = std::move(file);
    report.errors.push_back(std::move(f));
  };

  const fs::path manifest_path = dir / kManifestName;
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const Error& e) {
    fail(ErrorCode::kMalformedManifest, e.what(), kManifestName);
    return ds;
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedManifest, std::string("manifest parse error: ") + e.what(), kManifestName);
    return ds;
  }

  std::vector<BlockEntry> entries;
  try {
    if (manifest.at("version").get<int>() != kFormatVersion) {
      fail(ErrorCode::kMalformedManifest, "unsupported manifest version", kManifestName);
      return ds;
    }
    const json& meta = manifest.at("metadata");
    ds.metadata.model = meta.at("model").get<std::string>();
    ds.metadata.d = meta.at("d").get<std::size_t>();
    ds.metadata.h = meta.at("h").get<std::size_t>();
    ds.metadata.seed = meta.at("seed").get<std::uint64_t>();
    ds.metadata.embedding_scope = parse_embedding_scope(meta.at("embedding_scope").get<std::string>());
    for (const auto& r : manifest.at("records")) ds.records.push_back(record_from_json(r));
    for (const auto& b : manifest.at("blocks")) {
      entries.push_back({b.at("record_id").get<std::string>(), b.at("kind").get<std::string>(),
                         b.at("layer").get<int>(), b.at("shape").get<std::vector<std::size_t>>(),
                         b.at("file").get<std::string>()});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedManifest, std::string("manifest schema error: ") + e.what(), kManifestName);
    return ds;
  } catch (const Error& e) {
    fail(e.code(), e.what(), kManifestName);
    return ds;
  }

  for (const auto& e : entries) {
    const bool is_emb = e.kind == "emb";
    if (!is_emb && e.kind != "attn") {
      fail(ErrorCode::kMalformedManifest, "unknown block kind '" + e.kind + "'", e.file);
      continue;
    }
    if ((is_emb && e.shape.size() != 2) || (!is_emb && e.shape.size() != 3) ||
        (!is_emb && e.shape[1] != e.shape[2])) {
      fail(ErrorCode::kMalformedManifest, "invalid shape for " + e.kind + " block", e.file);
      continue;
    }
    if (e.file.find('/') != std::string::npos || e.file.find('\\') != std::string::npos) {
      fail(ErrorCode::kMalformedManifest, "blob file must be a bare name", e.file);
      continue;
    }
    if (ds.find_record(e.record_id) == nullptr) {
      Finding f;
      f.code = ErrorCode::kDanglingIndex;
      f.record_id = e.record_id;
      f.layer = e.layer;
      f.file = e.file;
      f.message = "dangling index entry: no record with this id";
      report.errors.push_back(std::move(f));
      continue;
    }
    const fs::path blob = dir / e.file;
    std::error_code ec;
    if (!fs::is_regular_file(blob, ec)) {
      fail(ErrorCode::kMissingBlob, "missing blob " + e.file, e.file);
      continue;
    }
    std::size_t count = 1;
    for (auto s : e.shape) count *= s;
    const auto bytes = read_file(blob);
    if (bytes.size() != count * 4) {
      std::ostringstream os;
      os << "blob " << e.file << " has " << bytes.size() << " bytes, expected " << count * 4;
      fail(ErrorCode::kBlobSize, os.str(), e.file);
      continue;
    }
    if (is_emb) {
      ds.add_embedding({e.record_id, e.layer, e.shape[0], e.shape[1], decode_floats(bytes)});
    } else {
      ds.add_attention({e.record_id, e.layer, e.shape[0], e.shape[1], decode_floats(bytes)});
    }
  }
  return ds;
}

}  // namespace

std::string blob_name(const std::string& record_id, const std::string& kind, int layer) {
  return record_id + "." + kind + "." + std::to_string(layer) + ".bin";
}

std::string encode_floats(std::span<const float> values) {
  std::string out(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    out[4 * i + 0] = static_cast<char>(bits & 0xFF);
    out[4 * i + 1] = static_cast<char>((bits >> 8) & 0xFF);
    out[4 * i + 2] = static_cast<char>((bits >> 16) & 0xFF);
    out[4 * i + 3] = static_cast<char>((bits >> 24) & 0xFF);
  }
  return out;
}

std::vector<float> decode_floats(const std::string& bytes) {
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 3; b >= 0; --b) {
      bits = (bits << 8) | static_cast<unsigned char>(bytes[4 * i + static_cast<std::size_t>(b)]);
    }
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

void write_dump(const Dataset& dataset, const fs::path& dir) {
  const ValidationReport report = validate_dataset(dataset);
  if (!report.ok()) {
    throw Error(report.errors.front().code, "refusing to write invalid dataset: " +
                                                describe(report.errors.front(), false));
  }

  std::vector<const PromptRecord*> sorted;
  for (const auto& r : dataset.records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const PromptRecord* a, const PromptRecord* b) { return a->id < b->id; });

  json records = json::array();
  for (const auto* r : sorted) records.push_back(record_to_json(*r));

  // (record_id, kind, layer) ordering; std::map keys already sort by (id, layer).
  std::vector<std::pair<std::string, std::string>> blobs;
  json blocks = json::array();
  for (const auto& [key, b] : dataset.embeddings) {
    const auto name = blob_name(b.record_id, "emb", b.layer);
    blocks.push_back({{"record_id", b.record_id}, {"kind", "emb"}, {"layer", b.layer},
                      {"shape", {b.n_tokens, b.dim}}, {"file", name}});
    blobs.emplace_back(name, encode_floats(b.values));
  }
  for (const auto& [key, b] : dataset.attention) {
    const auto name = blob_name(b.record_id, "attn", b.layer);
    blocks.push_back({{"record_id", b.record_id}, {"kind", "attn"}, {"layer", b.layer},
                      {"shape", {b.heads, b.n, b.n}}, {"file", name}});
    blobs.emplace_back(name, encode_floats(b.values));
  }
  std::sort(blocks.begin(), blocks.end(), [](const json& a, const json& b) {
    return std::tie(a["record_id"].get_ref<const std::string&>(), a["kind"].get_ref<const std::string&>(),
                    a["layer"].get_ref<const json::number_integer_t&>()) <
           std::tie(b["record_id"].get_ref<const std::string&>(), b["kind"].get_ref<const std::string&>(),
                    b["layer"].get_ref<const json::number_integer_t&>());
  });

  const auto& meta = dataset.metadata;
  json manifest = {
      {"format", "iclscope.dump"},
      {"version", kFormatVersion},
      {"metadata",
       {{"model", meta.model},
        {"d", meta.d},
        {"h", meta.h},
        {"seed", meta.seed},
        {"embedding_scope", to_string(meta.embedding_scope)}}},
      {"records", std::move(records)},
      {"blocks", std::move(blocks)},
  };

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [name, bytes] : blobs) write_file(dir / name, bytes);
  write_file(dir / kManifestName, manifest.dump(2) + "\n");
}

Dataset read_dump(const fs::path& dir) {
  ValidationReport report;
  Dataset ds = load(dir, report);
  if (report.ok()) {
    ValidationReport inv = validate_dataset(ds);
    report.errors = std::move(inv.errors);
  }
  if (!report.ok()) {
    const Finding& first = report.errors.front();
    throw Error(first.code, describe(first, false));
  }
  return ds;
}

ValidationReport validate_dump(const fs::path& dir) {
  ValidationReport report;
  Dataset ds;
  try {
    ds = load(dir, report);
  } catch (const std::exception& e) {
    Finding f;
    f.code = ErrorCode::kIo;
    f.message = e.what();
    report.errors.push_back(std::move(f));
    return report;
  }
  ValidationReport inv = validate_dataset(ds);
  for (auto& f : inv.errors) {
    report.errors.push_back(std::move(f));
  }
  for (auto& f : inv.warnings) report.warnings.push_back(std::move(f));
  return report;
}

}  // namespace iclscope::tensorstore

#include <nlohmann/json.hpp>

#include "../support/oracles.hpp"
#include "iclscope/tensorstore/dump_io.hpp"
#include "iclscope/tensorstore/spans.hpp"
#include "iclscope/tensorstore/validate.hpp"
#include "test_helpers.hpp"

using namespace iclscope;
using namespace iclscope::tensorstore;

namespace {

// Two records, two layers, d = 2, h = 1; embeddings cover every token.
Dataset tiny_dataset() {
  Dataset ds;
  ds.metadata = {"tiny", 2, 1, 9, EmbeddingScope::kFull};
  auto r1 = oracle::make_record("r1", "ab cd", " ef", {{0, 2}, {2, 5}, {5, 8}}, 2);
  r1.segments["first"] = {{0, 2}};
  r1.labels["task"] = "demo";
  r1.layer_ids = {0, 1};
  auto r2 = oracle::make_record("r2", "xy", "z", {{0, 2}, {2, 3}}, 1);
  r2.layer_ids = {0, 1};
  ds.records = {r1, r2};
  for (int layer : {0, 1}) {
    EmbeddingBlock e1{"r1", layer, 3, 2, {1.f, 2.f, 3.f, 4.f, 5.f, 6.f}};
    e1.values[0] += static_cast<float>(layer);
    ds.add_embedding(e1);
    ds.add_embedding({"r2", layer, 2, 2, {0.5f, -0.5f, 0.25f, 1e-7f}});
    ds.add_attention({"r1", layer, 1, 3, {1, 0, 0, 0.5f, 0.5f, 0, 0.25f, 0.25f, 0.5f}});
    ds.add_attention({"r2", layer, 1, 2, {1, 0, 0.5f, 0.5f}});
  }
  return ds;
}

}  // namespace

TEST_SUITE("tensorstore") {
  TEST_CASE("single 1x2 embedding block is an 8 byte blob with shape [1,2]") {
    testutil::TempDir dir("ts_single");
    Dataset ds;
    ds.metadata = {"m", 2, 1, 0, EmbeddingScope::kFull};
    auto r = oracle::make_record("only", "a", "", {{0, 1}}, 1);
    ds.records = {r};
    ds.add_embedding({"only", 0, 1, 2, {1.0f, 2.0f}});
    ds.add_attention({"only", 0, 1, 1, {1.0f}});
    write_dump(ds, dir.path());
    const auto blob = dir.path() / blob_name("only", "emb", 0);
    CHECK(std::filesystem::file_size(blob) == 8);
    const auto manifest = nlohmann::json::parse(testutil::slurp(dir.path() / kManifestName));
    bool found = false;
    for (const auto& b : manifest.at("blocks")) {
      if (b.at("kind") == "emb") {
        CHECK(b.at("shape") == nlohmann::json::array({1, 2}));
        found = true;
      }
    }
    CHECK(found);
  }

  TEST_CASE("float32 little-endian encoding is exact") {
    const std::vector<float> v{1.0f, -2.5f, 1e-7f, 3.4028235e38f};
    const auto bytes = encode_floats(v);
    CHECK(bytes.size() == 16);
    CHECK(static_cast<unsigned char>(bytes[3]) == 0x3F);  // 1.0f = 0x3F800000
    CHECK(static_cast<unsigned char>(bytes[2]) == 0x80);
    CHECK(decode_floats(bytes) == v);
  }

  TEST_CASE("round trip and byte-identical rewrites") {
    testutil::TempDir a("ts_rt_a"), b("ts_rt_b");
    const Dataset ds = tiny_dataset();
    write_dump(ds, a.path());
    const Dataset back = read_dump(a.path());
    CHECK(back == ds);
    write_dump(back, b.path());
    for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
      const auto other = b.path() / entry.path().filename();
      REQUIRE(std::filesystem::exists(other));
      CHECK(testutil::slurp(entry.path()) == testutil::slurp(other));
    }
  }

  TEST_CASE("truncated blob names the file") {
    testutil::TempDir dir("ts_trunc");
    write_dump(tiny_dataset(), dir.path());
    const auto blob = dir.path() / blob_name("r1", "emb", 1);
    auto bytes = testutil::slurp(blob);
    testutil::spit(blob, bytes.substr(0, bytes.size() - 4));
    try {
      (void)read_dump(dir.path());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kBlobSize);
      CHECK(std::string(e.what()).find(blob.filename().string()) != std::string::npos);
    }
    const auto rep = validate_dump(dir.path());
    REQUIRE(rep.errors.size() == 1);
    CHECK(rep.errors[0].file == blob.filename().string());
  }

  TEST_CASE("manifest block pointing at an absent record is a dangling index entry") {
    testutil::TempDir dir("ts_dangling");
    write_dump(tiny_dataset(), dir.path());
    auto manifest = nlohmann::json::parse(testutil::slurp(dir.path() / kManifestName));
    manifest["blocks"][0]["record_id"] = "ghost";
    testutil::spit(dir.path() / kManifestName, manifest.dump());
    try {
      (void)read_dump(dir.path());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDanglingIndex);
      CHECK(std::string(e.what()).find("dangling index entry") != std::string::npos);
    }
  }

  TEST_CASE("missing manifest and missing blob") {
    testutil::TempDir dir("ts_missing");
    CHECK_ERROR_CODE(read_dump(dir.path()), ErrorCode::kMalformedManifest);
    write_dump(tiny_dataset(), dir.path());
    std::filesystem::remove(dir.path() / blob_name("r2", "attn", 0));
    CHECK_ERROR_CODE(read_dump(dir.path()), ErrorCode::kMissingBlob);
  }

  TEST_CASE("validator findings") {
    SUBCASE("valid dataset is clean") {
      const auto rep = validate_dataset(tiny_dataset());
      CHECK(rep.errors.empty());
      CHECK(rep.warnings.empty());
    }
    SUBCASE("attention row summing to 0.5 is one located warning") {
      auto ds = tiny_dataset();
      auto& block = ds.attention.at({"r1", 1});
      block.at(0, 2, 2) = 0.0f;
      block.at(0, 2, 0) = 0.0f;  // row 2 now sums to 0.25 + 0.25
      const auto rep = validate_dataset(ds);
      CHECK(rep.errors.empty());
      REQUIRE(rep.warnings.size() == 1);
      CHECK(rep.warnings[0].record_id == "r1");
      CHECK(rep.warnings[0].layer == 1);
      CHECK(rep.warnings[0].head == 0u);
      CHECK(rep.warnings[0].row == 2u);
    }
    SUBCASE("segment past the end of x is one error") {
      auto ds = tiny_dataset();
      ds.records[0].segments["bad"] = {{6, 9}};
      const auto rep = validate_dataset(ds);
      CHECK(rep.errors.size() == 1);
    }
    SUBCASE("shape mismatch is an error") {
      auto ds = tiny_dataset();
      ds.embeddings.at({"r2", 0}).n_tokens = 3;
      const auto rep = validate_dataset(ds);
      REQUIRE(!rep.errors.empty());
      CHECK(rep.errors[0].code == ErrorCode::kShapeMismatch);
    }
    SUBCASE("prompt-only scope expects prompt rows") {
      auto ds = tiny_dataset();
      ds.metadata.embedding_scope = EmbeddingScope::kPromptOnly;
      CHECK(!validate_dataset(ds).ok());
      CHECK(expected_embedding_rows(ds.records[0], EmbeddingScope::kPromptOnly) == 2);
    }
  }

  TEST_CASE("span resolution by overlap") {
    const auto r = tiny_dataset().records[0];
    const std::vector<Interval> first{{0, 2}};
    CHECK(tokens_overlapping(r, first) == std::vector<std::size_t>{0});
    const std::vector<Interval> straddle{{1, 3}};
    CHECK(tokens_overlapping(r, straddle) == std::vector<std::size_t>{0, 1});
    CHECK(resolve_role(r, "prompt") == std::vector<std::size_t>{0, 1});
    CHECK(resolve_role(r, "response") == std::vector<std::size_t>{2});
    CHECK(resolve_role(r, "first") == std::vector<std::size_t>{0});
    CHECK_ERROR_CODE(resolve_role(r, "nope"), ErrorCode::kUnknownRole);
  }
}

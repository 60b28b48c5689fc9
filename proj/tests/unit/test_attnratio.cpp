#include <vector>

#include "../support/oracles.hpp"
#include "iclscope/attnratio/attnratio.hpp"
#include "iclscope/synth/synth.hpp"
#include "test_helpers.hpp"

using namespace iclscope;
using namespace iclscope::attnratio;
using doctest::Approx;

namespace {

TokenIndexSet set(std::vector<std::size_t> idx) { return {"r", "test", std::move(idx)}; }

AggregatedAttention matrix(Eigen::MatrixXd m) { return {"r", 0, std::move(m), Aggregation::kMean}; }

// Records with prompt "Alpha beta. Gamma delta." and a short response; focus segment on the first sentence.
std::vector<tensorstore::PromptRecord> skeletons(std::size_t n, const std::string& group) {
  std::vector<tensorstore::PromptRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    tensorstore::PromptRecord r;
    r.id = group + "_" + std::to_string(100 + i);
    r.prompt_text = "Alpha beta. Gamma delta.";
    r.response_text = " Yes it is.";
    r.segments["focus"] = {{0, 11}};
    r.labels["arm"] = group;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

TEST_SUITE("attnratio") {
  TEST_CASE("head aggregation") {
    tensorstore::AttentionBlock b{"r", 0, 2, 1, {0.2f, 0.8f}};
    CHECK(aggregate_heads(b, Aggregation::kMax).matrix(0, 0) == Approx(0.8));
    CHECK(aggregate_heads(b, Aggregation::kMean).matrix(0, 0) == Approx(0.5));
    tensorstore::AttentionBlock one{"r", 0, 1, 2, {0.25f, 0.75f, 1.0f, 0.0f}};
    const auto a = aggregate_heads(one, Aggregation::kMax);
    CHECK(a.matrix(0, 1) == 0.75);
    CHECK(a.matrix(1, 0) == 1.0);
  }

  TEST_CASE("ratio definition on hand-built matrices") {
    CHECK(attention_ratio(matrix(Eigen::MatrixXd::Constant(5, 5, 0.2)), set({3, 4}), set({0}), set({1, 2})) == Approx(1.0).epsilon(1e-12));
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
    A.row(2) << 0.6, 0.2, 0.0, 0.2;
    CHECK(attention_ratio(matrix(A), set({2}), set({0}), set({1, 3})) == Approx(3.0).epsilon(1e-12));
    CHECK(attention_ratio(matrix(A), set({2}), set({0, 1}), set({0, 1})) == 1.0);
  }

  TEST_CASE("ratio is unchanged by rescaling the attending rows") {
    Eigen::MatrixXd A(3, 3);
    A << 0.1, 0.2, 0.7, 0.3, 0.3, 0.4, 0.5, 0.25, 0.25;
    const double base = attention_ratio(matrix(A), set({1, 2}), set({0}), set({1, 2}));
    Eigen::MatrixXd B = A;
    B.row(1) *= 3.0;
    B.row(2) *= 3.0;
    CHECK(attention_ratio(matrix(B), set({1, 2}), set({0}), set({1, 2})) == Approx(base).epsilon(1e-12));
  }

  TEST_CASE("ratio errors") {
    const auto A = matrix(Eigen::MatrixXd::Identity(3, 3));
    CHECK_ERROR_CODE(attention_ratio(A, set({}), set({0}), set({1})), ErrorCode::kEmptySet);
    CHECK_ERROR_CODE(attention_ratio(A, set({0}), set({0}), set({1, 2})), ErrorCode::kZeroDenominator);
    CHECK_ERROR_CODE(attention_ratio(A, set({5}), set({0}), set({1})), ErrorCode::kInvalidArgument);
  }

  TEST_CASE("span targets") {
    auto r = oracle::make_record("r", "hello wor", "ld wor", {{0, 5}, {5, 9}, {9, 11}, {11, 15}}, 2);
    CHECK(token_spans(r, SpanTarget::chars(0, 5)).indices == std::vector<std::size_t>{0});
    CHECK(token_spans(r, SpanTarget::chars(3, 7)).indices == std::vector<std::size_t>{0, 1});
    CHECK(token_spans(r, SpanTarget::substring("hello")).indices == std::vector<std::size_t>{0});
    CHECK_ERROR_CODE(token_spans(r, SpanTarget::substring("wor")), ErrorCode::kAmbiguousSubstring);
    CHECK_ERROR_CODE(token_spans(r, SpanTarget::substring("zzz")), ErrorCode::kSubstringNotFound);
    CHECK(token_spans(r, SpanTarget::role("response")).indices == std::vector<std::size_t>{2, 3});
    CHECK(parse_target("chars:3-7").interval == tensorstore::Interval{3, 7});
    CHECK(parse_target("text:a b").text == "a b");
    CHECK(parse_target("s_inf").kind == SpanTarget::Kind::kRole);
  }

  TEST_CASE("planted generator closed forms") {
    // Exactly uniform rows when the plant matches the uniform share.
    auto uni = synth::PlantedAttentionSpec::from_ranges(10, 8, 10, 0, 2, 0.2, 1, 3);
    const auto ub = synth::synth_attention(uni);
    const double r1 = attention_ratio(aggregate_heads(ub, Aggregation::kMean), set({8, 9}), set({0, 1}),
                                      set({2, 3, 4, 5, 6, 7, 8, 9}));
    CHECK(std::abs(r1 - 1.0) < 1e-6);
    auto spec = synth::PlantedAttentionSpec::from_ranges(10, 8, 10, 0, 2, 0.8, 4, 5);
    const auto block = synth::synth_attention(spec);
    for (std::size_t h = 0; h < block.heads; ++h) {
      for (std::size_t i = 0; i < block.n; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < block.n; ++j) s += block.at(h, i, j);
        CHECK(std::abs(s - 1.0) < 1e-6);
      }
    }
    const std::vector<std::size_t> rest{2, 3, 4, 5, 6, 7, 8, 9};
    for (auto agg : {Aggregation::kMean, Aggregation::kMax}) {
      const double r = attention_ratio(aggregate_heads(block, agg), set({8, 9}), set({0, 1}), set(rest));
      CHECK(r == Approx(16.0).epsilon(0.05));
    }
  }

  TEST_CASE("study: planted focus against uniform") {
    auto recs = skeletons(30, "plant");
    auto more = skeletons(30, "flat");
    recs.insert(recs.end(), more.begin(), more.end());
    synth::SynthDumpSpec spec;
    spec.layers = {0, 1};
    spec.focus_role = "focus";
    spec.focus_label = "arm";
    spec.focus_mass_by_value = {{"plant", 0.8}};
    spec.focus_mass = 0.0;  // flat arm: no plant
    spec.seed = 17;
    const auto ds = synth::synth_dataset(recs, spec);

    AraConfig cfg;
    cfg.s = SpanTarget::role("focus");
    cfg.group_by = {"arm"};
    const auto study = ara_study(ds, cfg);
    CHECK(study.layer == 1);
    REQUIRE(study.groups.size() == 2);
    CHECK(study.groups[0].group == "arm=flat");
    // 3 focus tokens out of 6 prompt tokens and 10 in total, with t = the whole prompt.
    const double planted = (0.8 / 3) / ((0.8 + 3 * 0.2 / 7) / 6);
    CHECK(study.groups[1].mean == Approx(planted).epsilon(0.02));
    CHECK(study.groups[0].mean == Approx(1.0).epsilon(0.05));
    REQUIRE(study.comparisons.size() == 1);
    REQUIRE(study.comparisons[0].welch.has_value());
    CHECK(study.comparisons[0].welch->p_value < 1e-3);
    CHECK(study.excluded == 0);
    const auto csv = study.samples_csv();
    CHECK(csv.find("plant_100") != std::string::npos);
    CHECK(study.ratios_by_group().at("arm=plant").size() == 30);
  }

  TEST_CASE("study: identical arms give t = 0") {
    const auto ds = synth::synth_dataset(skeletons(10, "same"), synth::SynthDumpSpec{});
    AraConfig cfg;
    cfg.s = SpanTarget::role("focus");
    const auto a = ara_study(ds, cfg);
    const auto v = a.ratios_by_group().at("all");
    const auto w = stats::welch_t_test(v, v);
    CHECK(w.statistic == 0.0);
    CHECK(w.p_value == Approx(1.0));
    cfg.layer = 9;
    CHECK_ERROR_CODE(ara_study(ds, cfg), ErrorCode::kNoAttentionAtLayer);
  }

  TEST_CASE("group keys") {
    auto r = oracle::make_record("r", "x", "", {{0, 1}}, 1);
    r.labels = {{"icl", "1"}, {"name", "Fred"}};
    CHECK(group_key(r, {}) == "all");
    CHECK(group_key(r, {"icl", "name"}) == "icl=1,name=Fred");
    CHECK_ERROR_CODE(group_key(r, {"nope"}), ErrorCode::kMissingLabel);
  }
}

#include "iclscope/taskgen/reading.hpp"

#include <algorithm>
#include <numeric>

#include "iclscope/error.hpp"
#include "iclscope/rng.hpp"
#include "iclscope/text.hpp"

namespace iclscope::taskgen {

namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("pool file lacks '") + key + "': " + e.what());
  }
}

// Draws `k` distinct entries from `pool` that are not in `exclude`.
std::vector<std::string> draw_distinct(const std::vector<std::string>& pool, std::size_t k,
                                       const std::vector<std::string>& exclude, Rng& rng) {
  std::vector<std::string> candidates;
  for (const auto& p : pool) {
    if (std::find(exclude.begin(), exclude.end(), p) == exclude.end()) candidates.push_back(p);
  }
  if (candidates.size() < k) {
    throw Error(ErrorCode::kPoolExhausted, "pool has " + std::to_string(candidates.size()) +
                                               " usable entries, need " + std::to_string(k));
  }
  rng.shuffle(std::span<std::string>(candidates));
  candidates.resize(k);
  return candidates;
}

std::string pick(const std::vector<std::string>& pool, Rng& rng) {
  return pool[static_cast<std::size_t>(rng.below(pool.size()))];
}

std::string substitute_activity(std::string relation, const std::string& activity) {
  const auto pos = relation.find("{activity}");
  if (pos != std::string::npos) relation.replace(pos, 10, activity);
  return relation;
}

// Builds one composite question around (informant, activity) from the given pools.
ReadingPrompt compose(const std::string& informant, const std::string& activity, std::size_t composite_size,
                      const std::vector<std::string>& names, const std::vector<std::string>& activities,
                      const std::vector<std::string>& relations, Rng& rng) {
  ReadingPrompt p;
  p.ground_truth_activity = activity;
  const std::size_t extra_names = composite_size - 1 + 1 + (composite_size == 1 ? 1 : 0);
  const auto others = draw_distinct(names, extra_names, {informant}, rng);
  const auto other_acts = draw_distinct(activities, composite_size - 1, {activity}, rng);

  p.simple_prompts.push_back({informant, activity});
  for (std::size_t i = 0; i + 1 < composite_size; ++i) p.simple_prompts.push_back({others[i], other_acts[i]});
  p.target_name = others[composite_size - 1];
  // The relation object is a distractor when one exists, otherwise a name outside the story.
  p.other_name = composite_size == 1 ? others[composite_size] : p.simple_prompts[1 + rng.below(composite_size - 1)].name;

  std::string rel = pick(relations, rng);
  if (rel.find("{activity}") != std::string::npos) {
    rel = substitute_activity(rel, draw_distinct(activities, 1, {activity}, rng).front());
  }
  p.relation = rel;

  rng.shuffle(std::span<SimplePrompt>(p.simple_prompts));
  for (std::size_t i = 0; i < p.simple_prompts.size(); ++i) {
    if (p.simple_prompts[i].name == informant) p.informative_index = i;
  }
  return p;
}

// Appends "Question: ... What is T doing? Answer:" and records spans for the main prompt.
void render_question(TextBuilder& b, const ReadingPrompt& p, bool record_segments) {
  b.append("Question: ");
  for (std::size_t i = 0; i < p.simple_prompts.size(); ++i) {
    const std::string sentence = p.simple_prompts[i].sentence();
    if (record_segments) {
      b.mark(i == p.informative_index ? "s_inf" : "s_dist", sentence);
    } else {
      b.append(sentence);
    }
    b.append(" ");
  }
  const std::string question = p.target_name + " is doing the same thing as " +
                               p.simple_prompts[p.informative_index].name + ". " + p.target_name + " " +
                               p.relation + " " + p.other_name + ". What is " + p.target_name + " doing?";
  if (record_segments) {
    b.mark("question", question);
  } else {
    b.append(question);
  }
  b.append(" Answer:");
}

}  // namespace

ReadingPools ReadingPools::load(const std::filesystem::path& data_dir) {
  const auto j = load_json_file(data_dir / "pools" / "reading.json");
  return {string_list(j, "names"), string_list(j, "activities"), string_list(j, "icl_names"),
          string_list(j, "icl_activities"), string_list(j, "relations")};
}

std::vector<std::string> ReadingPrompt::distractor_sentences() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < simple_prompts.size(); ++i) {
    if (i != informative_index) out.push_back(simple_prompts[i].sentence());
  }
  return out;
}

SuiteRecord ReadingPrompt::to_record() const {
  SuiteRecord r;
  r.id = id;
  r.task = "reading";
  r.prompt_text = rendered;
  r.segments = segments;
  r.labels = {{"activity", ground_truth_activity},
              {"informant", simple_prompts[informative_index].name},
              {"target", target_name},
              {"composite_size", std::to_string(simple_prompts.size())},
              {"icl", icl ? "1" : "0"}};
  r.answer = {{"activity", ground_truth_activity}, {"target", target_name}};
  r.oracle_response = " " + target_name + " is " + ground_truth_activity + ".";
  return r;
}

std::vector<ReadingPrompt> gen_reading_suite(const ReadingPools& pools, std::size_t n_names,
                                             std::size_t n_activities, std::size_t composite_size,
                                             bool with_icl, std::uint64_t seed) {
  if (composite_size < 1) throw Error(ErrorCode::kInvalidArgument, "composite_size must be >= 1");
  if (n_names * n_activities < composite_size) {
    throw Error(ErrorCode::kInvalidArgument, "n_names * n_activities must be >= composite_size");
  }
  if (n_names > pools.names.size() || n_activities > pools.activities.size()) {
    throw Error(ErrorCode::kPoolExhausted, "requested more names or activities than the pool holds");
  }
  if (pools.relations.empty()) throw Error(ErrorCode::kPoolExhausted, "no relation templates");
  const std::vector<std::string> names(pools.names.begin(), pools.names.begin() + static_cast<std::ptrdiff_t>(n_names));
  const std::vector<std::string> acts(pools.activities.begin(),
                                      pools.activities.begin() + static_cast<std::ptrdiff_t>(n_activities));

  std::vector<ReadingPrompt> out;
  for (std::size_t ni = 0; ni < n_names; ++ni) {
    for (std::size_t ai = 0; ai < n_activities; ++ai) {
      const std::size_t index = ni * n_activities + ai;
      Rng rng(seed, index);
      ReadingPrompt p = compose(names[ni], acts[ai], composite_size, names, acts, pools.relations, rng);
      p.id = "read_c" + std::to_string(composite_size) + (with_icl ? "_icl_" : "_") + std::to_string(index);
      p.icl = with_icl;

      TextBuilder b;
      if (with_icl) {
        Rng icl_rng(seed ^ 0x1C1ULL, index);
        const auto& icl_names = pools.icl_names;
        const auto& icl_acts = pools.icl_activities;
        if (icl_names.empty() || icl_acts.empty()) throw Error(ErrorCode::kPoolExhausted, "empty ICL pool");
        const ReadingPrompt example = compose(pick(icl_names, icl_rng), pick(icl_acts, icl_rng), composite_size,
                                              icl_names, icl_acts, pools.relations, icl_rng);
        const std::size_t start = b.position();
        render_question(b, example, false);
        b.append(" " + example.target_name + " is " + example.ground_truth_activity + ".");
        b.add_span("icl_example", {start, b.position()});
        b.append(" ");
      }
      render_question(b, p, true);
      p.rendered = b.text();
      p.segments = b.segments();
      out.push_back(std::move(p));
    }
  }
  return out;
}

bool score_reading(const std::string& response, const std::string& ground_truth_activity) {
  const std::string needle = text::normalize(ground_truth_activity);
  if (needle.empty()) return false;
  const std::string hay = " " + text::normalize(response) + " ";
  return hay.find(" " + needle + " ") != std::string::npos;
}

}  // namespace iclscope::taskgen

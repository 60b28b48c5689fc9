#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iclscope/taskgen/suite.hpp"

namespace iclscope::taskgen {

struct ReadingPools {
  std::vector<std::string> names;
  std::vector<std::string> activities;
  std::vector<std::string> icl_names;
  std::vector<std::string> icl_activities;
  std::vector<std::string> relations;  // "{activity}" is substituted

  static ReadingPools load(const std::filesystem::path& data_dir = default_data_dir());
};

struct SimplePrompt {
  std::string name;
  std::string activity;
  std::string sentence() const { return name + " is " + activity + "."; }
};

struct ReadingPrompt {
  std::string id;
  std::vector<SimplePrompt> simple_prompts;  // in rendered order
  std::size_t informative_index = 0;
  std::string target_name;
  std::string other_name;  // object of the relation sentence
  std::string relation;
  std::string ground_truth_activity;
  bool icl = false;
  std::string rendered;
  SegmentMap segments;

  std::vector<std::string> distractor_sentences() const;
  SuiteRecord to_record() const;
};

std::vector<ReadingPrompt> gen_reading_suite(const ReadingPools& pools, std::size_t n_names,
                                             std::size_t n_activities, std::size_t composite_size,
                                             bool with_icl, std::uint64_t seed);

bool score_reading(const std::string& response, const std::string& ground_truth_activity);

}  // namespace iclscope::taskgen

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iclscope/taskgen/suite.hpp"

namespace iclscope::taskgen {

using NodeId = int;

struct GraphSpec {
  std::string id;
  std::vector<NodeId> nodes;  // ascending
  std::vector<std::pair<NodeId, NodeId>> edges;
  bool directed = true;
  NodeId anchor = 0;
  std::map<NodeId, int> rewards;

  // Out-neighbours in ascending order, both directions when undirected.
  std::vector<NodeId> successors(NodeId u) const;
  bool has_edge(NodeId u, NodeId v) const;
  std::size_t index_of(NodeId u) const;  // position in `nodes`

  static GraphSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

GraphSpec load_graph(const std::filesystem::path& path);
// Loads `<data_dir>/graphs/<id>.json`.
GraphSpec load_fixture(const std::string& id, const std::filesystem::path& data_dir = default_data_dir());
inline const std::vector<std::string> kFixtureGraphs{"n7line", "n7tree", "n13line", "n16cluster"};

// Throws InvalidArgument when edges reference unknown nodes or some node is unreachable from the anchor.
void check_graph(const GraphSpec& graph);

// BFS with neighbours expanded in ascending id order. Throws Unreachable.
std::vector<NodeId> shortest_path(const GraphSpec& graph, NodeId start, NodeId goal);
// Hop distances from `start`; unreachable nodes are absent.
std::map<NodeId, int> bfs_distances(const GraphSpec& graph, NodeId start);
// Longest finite shortest-path distance over all ordered pairs.
int diameter(const GraphSpec& graph);

// Uniform random walk over successors; sinks get an absorbing self-loop.
Eigen::MatrixXd transition_matrix(const GraphSpec& graph);
// (I - gamma T)^-1. Throws InvalidGamma, InvalidArgument (T not stochastic), SingularMatrix.
Eigen::MatrixXd successor_representation(const Eigen::MatrixXd& T, double gamma);
// (SR + SR^T) / 2 min-max scaled to [0,1].
Eigen::MatrixXd sr_hypothesis(const GraphSpec& graph, double gamma = 0.95);
inline constexpr double kDefaultGamma = 0.95;

enum class Domain { kOrdRooms, kUnordSpatial, kSocialTies };
const char* to_string(Domain d);
Domain parse_domain(const std::string& text);

enum class Condition { k1Step, k2Step, k3Step, kNStep };
const char* to_string(Condition c);
Condition parse_condition(const std::string& text);
inline const std::vector<Condition> kAllConditions{Condition::k1Step, Condition::k2Step, Condition::k3Step,
                                                   Condition::kNStep};
int condition_hops(Condition c, const GraphSpec& graph);

inline constexpr std::size_t kPairsPerCondition = 5;
inline constexpr int kGenerationsPerCondition = 3;
inline constexpr const char* kGraphIclPrefix =
    "You are an AI assistant that helps people find information. You will receive a task and think step "
    "by step. Example 1: From room 2 what is the shortest path to room 4? Starting from room 2, please "
    "list the room numbers in order, including 2, separated by commas. Here is the sequence of steps "
    "from the starting room to the destination room: Go from room 2 to room 4. Answer: 2, 4\nTask: ";

struct TraversalTask {
  std::string id;
  GraphSpec graph;
  Domain domain = Domain::kOrdRooms;
  NodeId start = 0;
  NodeId goal = 0;
  Condition condition = Condition::k1Step;
  bool icl = false;
  int generation_index = 0;
  std::string rendered;
  std::map<NodeId, std::string> node_label_map;
  SegmentMap segments;

  std::vector<NodeId> oracle_path() const { return shortest_path(graph, start, goal); }
  std::string oracle_response() const;
  SuiteRecord to_record() const;
  static TraversalTask from_record(const SuiteRecord& record);
};

// Surface labels for every node under a domain. unordSpatial labels are seeded.
std::map<NodeId, std::string> node_labels(const GraphSpec& graph, Domain domain, std::uint64_t seed,
                                          const std::filesystem::path& data_dir = default_data_dir());

struct GraphSuite {
  std::vector<TraversalTask> tasks;
  std::vector<std::string> warnings;
};

GraphSuite gen_graph_suite(const GraphSpec& graph, Domain domain, const std::set<Condition>& conditions,
                           bool with_icl, std::uint64_t seed,
                           const std::filesystem::path& data_dir = default_data_dir());

// Labels of the first run of >= 2 comma separated node labels, or empty.
std::vector<NodeId> parse_traversal(const std::string& response, const std::map<NodeId, std::string>& labels);
bool score_traversal(const std::string& response, const TraversalTask& task);

}  // namespace iclscope::taskgen

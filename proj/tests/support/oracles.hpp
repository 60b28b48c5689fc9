#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the code under test except for plain data types.

#include <cmath>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iclscope/taskgen/graph.hpp"
#include "iclscope/tensorstore/dataset.hpp"

namespace oracle {

using iclscope::taskgen::GraphSpec;
using iclscope::taskgen::NodeId;

// Adjacency straight from the edge list; undirected edges count both ways.
inline bool adjacent(const GraphSpec& g, NodeId u, NodeId v) {
  for (const auto& [a, b] : g.edges) {
    if (a == u && b == v) return true;
    if (!g.directed && a == v && b == u) return true;
  }
  return false;
}

// Every simple path from start to goal, by exhaustive depth-first enumeration.
inline std::vector<std::vector<NodeId>> all_simple_paths(const GraphSpec& g, NodeId start, NodeId goal) {
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> path{start};
  std::set<NodeId> on_path{start};
  std::function<void(NodeId)> walk = [&](NodeId u) {
    if (u == goal) {
      out.push_back(path);
      return;
    }
    for (NodeId v : g.nodes) {
      if (on_path.count(v) || !adjacent(g, u, v)) continue;
      path.push_back(v);
      on_path.insert(v);
      walk(v);
      on_path.erase(v);
      path.pop_back();
    }
  };
  walk(start);
  return out;
}

// Shortest simple paths; empty when goal is unreachable.
inline std::vector<std::vector<NodeId>> optimal_paths(const GraphSpec& g, NodeId start, NodeId goal) {
  auto all = all_simple_paths(g, start, goal);
  std::size_t best = static_cast<std::size_t>(-1);
  for (const auto& p : all) best = std::min(best, p.size());
  std::vector<std::vector<NodeId>> out;
  for (auto& p : all) {
    if (p.size() == best) out.push_back(std::move(p));
  }
  return out;
}

// Hop distance by enumeration, -1 when unreachable.
inline int brute_distance(const GraphSpec& g, NodeId start, NodeId goal) {
  const auto paths = optimal_paths(g, start, goal);
  return paths.empty() ? -1 : static_cast<int>(paths.front().size()) - 1;
}

// Sum_{t=0..K} gamma^t T^t by repeated multiplication.
inline Eigen::MatrixXd truncated_sr(const Eigen::MatrixXd& T, double gamma, int K) {
  const auto n = T.rows();
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = term;
  for (int t = 1; t <= K; ++t) {
    term = gamma * term * T;
    sum += term;
  }
  return sum;
}

// Row-stochastic walk built from the edge list: uniform over out-neighbours, sinks self-loop.
inline Eigen::MatrixXd walk_matrix(const GraphSpec& g) {
  const auto n = static_cast<Eigen::Index>(g.nodes.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int deg = 0;
    for (Eigen::Index j = 0; j < n; ++j) deg += adjacent(g, g.nodes[i], g.nodes[j]) ? 1 : 0;
    if (deg == 0) {
      T(i, i) = 1.0;
      continue;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (adjacent(g, g.nodes[i], g.nodes[j])) T(i, j) = 1.0 / deg;
    }
  }
  return T;
}

// Pearson correlation written out longhand.
inline double pearson_longhand(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Strict upper triangle, row-major.
inline std::vector<double> triangle(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

// Record whose tokens are given as (text, start, end) over prompt + response.
inline iclscope::tensorstore::PromptRecord make_record(const std::string& id, const std::string& prompt,
                                                       const std::string& response,
                                                       const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                                                       std::size_t prompt_tokens) {
  iclscope::tensorstore::PromptRecord r;
  r.id = id;
  r.prompt_text = prompt;
  r.response_text = response;
  const std::string full = prompt + response;
  for (const auto& [s, e] : spans) r.tokens.push_back({full.substr(s, e - s), s, e});
  r.prompt_token_count = prompt_tokens;
  r.layer_ids = {0};
  return r;
}

}  // namespace oracle

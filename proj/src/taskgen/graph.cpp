#include "iclscope/taskgen/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <numeric>

#include "iclscope/error.hpp"
#include "iclscope/rng.hpp"
#include "iclscope/text.hpp"

namespace iclscope::taskgen {

std::vector<NodeId> GraphSpec::successors(NodeId u) const {
  std::vector<NodeId> out;
  for (const auto& [a, b] : edges) {
    if (a == u) out.push_back(b);
    if (!directed && b == u) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool GraphSpec::has_edge(NodeId u, NodeId v) const {
  for (const auto& [a, b] : edges) {
    if ((a == u && b == v) || (!directed && a == v && b == u)) return true;
  }
  return false;
}

std::size_t GraphSpec::index_of(NodeId u) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), u);
  if (it == nodes.end() || *it != u) {
    throw Error(ErrorCode::kInvalidArgument, "node " + std::to_string(u) + " is not in graph '" + id + "'");
  }
  return static_cast<std::size_t>(it - nodes.begin());
}

GraphSpec GraphSpec::from_json(const nlohmann::json& j) {
  GraphSpec g;
  try {
    g.id = j.at("id").get<std::string>();
    g.nodes = j.at("nodes").get<std::vector<NodeId>>();
    for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
    g.directed = j.value("directed", true);
    g.anchor = j.value("anchor", g.nodes.empty() ? 0 : g.nodes.front());
    if (j.contains("rewards")) {
      for (const auto& [k, v] : j.at("rewards").items()) g.rewards[std::stoi(k)] = v.get<int>();
    }
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed graph fixture: ") + e.what());
  }
  std::sort(g.nodes.begin(), g.nodes.end());
  check_graph(g);
  return g;
}

nlohmann::json GraphSpec::to_json() const {
  nlohmann::json e = nlohmann::json::array();
  for (const auto& [a, b] : edges) e.push_back({a, b});
  nlohmann::json r = nlohmann::json::object();
  for (const auto& [k, v] : rewards) r[std::to_string(k)] = v;
  return {{"id", id}, {"nodes", nodes}, {"edges", e}, {"directed", directed}, {"anchor", anchor}, {"rewards", r}};
}

GraphSpec load_graph(const std::filesystem::path& path) { return GraphSpec::from_json(load_json_file(path)); }

GraphSpec load_fixture(const std::string& id, const std::filesystem::path& data_dir) {
  return load_graph(data_dir / "graphs" / (id + ".json"));
}

void check_graph(const GraphSpec& g) {
  if (g.nodes.empty()) throw Error(ErrorCode::kInvalidArgument, "graph '" + g.id + "' has no nodes");
  if (std::adjacent_find(g.nodes.begin(), g.nodes.end()) != g.nodes.end()) {
    throw Error(ErrorCode::kInvalidArgument, "graph '" + g.id + "' repeats a node id");
  }
  for (const auto& [a, b] : g.edges) {
    g.index_of(a);
    g.index_of(b);
  }
  g.index_of(g.anchor);
  if (bfs_distances(g, g.anchor).size() != g.nodes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "graph '" + g.id + "' is not connected from its anchor");
  }
}

namespace {

// BFS parents; neighbours are visited in ascending id order.
std::map<NodeId, NodeId> bfs_tree(const GraphSpec& g, NodeId start) {
  std::map<NodeId, NodeId> parent{{start, start}};
  std::deque<NodeId> queue{start};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.successors(u)) {
      if (parent.emplace(v, u).second) queue.push_back(v);
    }
  }
  return parent;
}

}  // namespace

std::map<NodeId, int> bfs_distances(const GraphSpec& g, NodeId start) {
  std::map<NodeId, int> dist{{start, 0}};
  std::deque<NodeId> queue{start};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.successors(u)) {
      if (dist.emplace(v, dist[u] + 1).second) queue.push_back(v);
    }
  }
  return dist;
}

std::vector<NodeId> shortest_path(const GraphSpec& g, NodeId start, NodeId goal) {
  g.index_of(start);
  g.index_of(goal);
  const auto parent = bfs_tree(g, start);
  if (!parent.count(goal)) {
    throw Error(ErrorCode::kUnreachable, "node " + std::to_string(goal) + " is unreachable from " +
                                             std::to_string(start) + " in graph '" + g.id + "'");
  }
  std::vector<NodeId> path{goal};
  while (path.back() != start) path.push_back(parent.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

int diameter(const GraphSpec& g) {
  int best = 0;
  for (NodeId u : g.nodes) {
    for (const auto& [v, d] : bfs_distances(g, u)) best = std::max(best, d);
  }
  return best;
}

Eigen::MatrixXd transition_matrix(const GraphSpec& g) {
  const auto n = static_cast<Eigen::Index>(g.nodes.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (NodeId u : g.nodes) {
    const auto i = static_cast<Eigen::Index>(g.index_of(u));
    const auto next = g.successors(u);
    if (next.empty()) {
      T(i, i) = 1.0;
      continue;
    }
    for (NodeId v : next) T(i, static_cast<Eigen::Index>(g.index_of(v))) = 1.0 / static_cast<double>(next.size());
  }
  return T;
}

Eigen::MatrixXd successor_representation(const Eigen::MatrixXd& T, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidGamma, "gamma must lie in [0,1), got " + std::to_string(gamma));
  }
  if (T.rows() != T.cols() || T.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "transition matrix must be square and nonempty");
  }
  if (T.minCoeff() < 0.0 || ((T.rowwise().sum().array() - 1.0).abs() > 1e-9).any()) {
    throw Error(ErrorCode::kInvalidArgument, "transition matrix is not row-stochastic");
  }
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(T.rows(), T.cols()) - gamma * T;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw Error(ErrorCode::kSingularMatrix, "I - gamma T is singular");
  return lu.inverse();
}

Eigen::MatrixXd sr_hypothesis(const GraphSpec& g, double gamma) {
  const Eigen::MatrixXd sr = successor_representation(transition_matrix(g), gamma);
  Eigen::MatrixXd h = 0.5 * (sr + sr.transpose());
  const double lo = h.minCoeff();
  const double hi = h.maxCoeff();
  if (hi - lo <= 0.0) return Eigen::MatrixXd::Zero(h.rows(), h.cols());
  return (h.array() - lo) / (hi - lo);
}

const char* to_string(Domain d) {
  switch (d) {
    case Domain::kOrdRooms: return "ordRooms";
    case Domain::kUnordSpatial: return "unordSpatial";
    case Domain::kSocialTies: return "socialTies";
  }
  return "ordRooms";
}

Domain parse_domain(const std::string& text) {
  if (text == "ordRooms") return Domain::kOrdRooms;
  if (text == "unordSpatial") return Domain::kUnordSpatial;
  if (text == "socialTies") return Domain::kSocialTies;
  throw Error(ErrorCode::kInvalidArgument, "unknown domain '" + text + "'");
}

const char* to_string(Condition c) {
  switch (c) {
    case Condition::k1Step: return "1stepPath";
    case Condition::k2Step: return "2stepPath";
    case Condition::k3Step: return "3stepPath";
    case Condition::kNStep: return "nstepPath";
  }
  return "1stepPath";
}

Condition parse_condition(const std::string& text) {
  for (Condition c : kAllConditions) {
    if (text == to_string(c)) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown condition '" + text + "'");
}

int condition_hops(Condition c, const GraphSpec& g) {
  switch (c) {
    case Condition::k1Step: return 1;
    case Condition::k2Step: return 2;
    case Condition::k3Step: return 3;
    case Condition::kNStep: return diameter(g);
  }
  return 1;
}

std::map<NodeId, std::string> node_labels(const GraphSpec& g, Domain domain, std::uint64_t seed,
                                          const std::filesystem::path& data_dir) {
  std::map<NodeId, std::string> out;
  switch (domain) {
    case Domain::kOrdRooms:
      for (NodeId u : g.nodes) out[u] = u == g.anchor ? "lobby" : std::to_string(u);
      break;
    case Domain::kUnordSpatial: {
      // Distinct two-digit room numbers in a seeded order.
      std::vector<int> numbers(90);
      std::iota(numbers.begin(), numbers.end(), 10);
      Rng rng(seed, fnv1a64("unordSpatial:" + g.id));
      rng.shuffle(std::span<int>(numbers));
      std::size_t k = 0;
      for (NodeId u : g.nodes) out[u] = u == g.anchor ? "lobby" : std::to_string(numbers[k++]);
      break;
    }
    case Domain::kSocialTies: {
      const auto names = load_json_file(data_dir / "pools" / "social.json").at("names").get<std::vector<std::string>>();
      if (names.size() < g.nodes.size()) {
        throw Error(ErrorCode::kPoolExhausted, "social name pool is smaller than graph '" + g.id + "'");
      }
      // The anchor always takes the first name.
      std::size_t k = 1;
      for (NodeId u : g.nodes) out[u] = u == g.anchor ? names[0] : names[k++];
      break;
    }
  }
  return out;
}

namespace {

// Two chains hanging off the anchor, each at least two nodes long.
struct LineShape {
  std::vector<NodeId> a;
  std::vector<NodeId> b;
};

std::optional<LineShape> line_shape(const GraphSpec& g) {
  if (!g.directed) return std::nullopt;
  const auto roots = g.successors(g.anchor);
  if (roots.size() != 2) return std::nullopt;
  LineShape shape;
  std::size_t covered = 1;
  for (int c = 0; c < 2; ++c) {
    auto& chain = c == 0 ? shape.a : shape.b;
    NodeId u = roots[static_cast<std::size_t>(c)];
    while (true) {
      if (u == g.anchor || std::find(chain.begin(), chain.end(), u) != chain.end()) return std::nullopt;
      chain.push_back(u);
      const auto next = g.successors(u);
      if (next.empty()) break;
      if (next.size() != 1) return std::nullopt;
      u = next.front();
    }
    if (chain.size() < 2) return std::nullopt;
    covered += chain.size();
  }
  if (covered != g.nodes.size()) return std::nullopt;
  return shape;
}

class Renderer {
 public:
  Renderer(const GraphSpec& g, Domain domain, const std::map<NodeId, std::string>& labels, TextBuilder& b)
      : g_(g), social_(domain == Domain::kSocialTies), labels_(labels), b_(b) {}

  // Mention with its domain noun: "room 3", "the lobby", "Amir".
  void ref(NodeId u, bool sentence_start = false) {
    if (social_) {
      node(u);
    } else if (u == g_.anchor) {
      b_.append(sentence_start ? "The " : "the ");
      node(u);
    } else {
      b_.append(sentence_start ? "Room " : "room ");
      node(u);
    }
  }
  // Question-form mention: "room 3", "the lobby", "scholar Amir".
  void qref(NodeId u) {
    if (social_) {
      b_.append("scholar ");
      node(u);
    } else {
      ref(u);
    }
  }
  void bare(NodeId u) {
    if (!social_ && u == g_.anchor) b_.append("the ");
    node(u);
  }
  void node(NodeId u) { b_.mark("node:" + std::to_string(u), labels_.at(u)); }
  void text(std::string_view s) { b_.append(s); }

  // "x, y and z"
  void list(const std::vector<NodeId>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) b_.append(i + 1 == items.size() ? " and " : ", ");
      ref(items[i]);
    }
  }

  void rooms_line(const LineShape& s) {
    const auto& a = s.a;
    const auto& c = s.b;
    text("Imagine a building with " + text::spell_number(static_cast<int>(g_.nodes.size() - 1)) +
         " rooms. From the lobby you have two choices, you can go to ");
    ref(a[0]);
    text(" or ");
    ref(c[0]);
    text(". You enter ");
    ref(a[0]);
    text(", at the other end of ");
    ref(a[0]);
    text(" there's a door that leads to ");
    ref(a[1]);
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
      text(", and ");
      ref(a[i]);
      text(" leads to ");
      ref(a[i + 1]);
    }
    text(". ");
    if (auto r = g_.rewards.find(a.back()); r != g_.rewards.end()) {
      text("There's a chest in ");
      ref(a.back());
      text(". You open it and there's " + std::to_string(r->second) +
           " dollars, but you do not take any money, you're just learning about the environment. ");
    }
    text("Then you exit and start over. This time in the lobby you choose ");
    ref(c[0]);
    text(", which has a door to ");
    ref(c[1]);
    for (std::size_t i = 1; i + 1 < c.size(); ++i) {
      text(", and ");
      ref(c[i]);
      text(" has a door that leads to ");
      ref(c[i + 1]);
    }
    text(". ");
    if (auto r = g_.rewards.find(c.back()); r != g_.rewards.end()) {
      text("You find a chest with " + std::to_string(r->second) + " dollars in ");
      ref(c.back());
      text(", but you do not take any money, you're just learning about the environment. ");
    }
    text("You return to the lobby. ");
  }

  void rooms_generic() {
    text("Imagine a building with " + text::spell_number(static_cast<int>(g_.nodes.size() - 1)) + " rooms. ");
    for (NodeId u : g_.nodes) {
      const auto next = g_.successors(u);
      if (next.empty()) continue;
      ref(u, true);
      text(next.size() == 1 ? " has a door to " : " has doors to ");
      list(next);
      text(". ");
    }
    for (const auto& [u, r] : g_.rewards) {
      text("There's a chest in ");
      ref(u);
      text(" with " + std::to_string(r) +
           " dollars, but you do not take any money, you're just learning about the environment. ");
    }
    text("You return to the lobby. ");
  }

  void scholars_intro() {
    text("Imagine a group of " + text::spell_number(static_cast<int>(g_.nodes.size())) + " scholars: ");
    list(g_.nodes);
    text(". ");
  }

  void social_line(const LineShape& s) {
    const auto& a = s.a;
    const auto& c = s.b;
    scholars_intro();
    text("You are friends with ");
    ref(g_.anchor);
    text(", who can either introduce you to ");
    ref(a[0]);
    text(" or ");
    ref(c[0]);
    text(". ");
    ref(a[0]);
    text(" is connected with ");
    ref(a[1]);
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
      text(", and ");
      ref(a[i]);
      text(" is connected with ");
      ref(a[i + 1]);
    }
    text(". ");
    donation(a.back());
    text("Then you exit and start over. This time you ask ");
    ref(g_.anchor);
    text(" to introduce you to ");
    ref(c[0]);
    text(", who is connected with ");
    ref(c[1]);
    for (std::size_t i = 1; i + 1 < c.size(); ++i) {
      text(", and ");
      ref(c[i]);
      text(" is connected with ");
      ref(c[i + 1]);
    }
    text(". ");
    donation(c.back());
  }

  void social_generic() {
    scholars_intro();
    text("You are friends with ");
    ref(g_.anchor);
    text(". ");
    for (NodeId u : g_.nodes) {
      const auto next = g_.successors(u);
      if (next.empty()) continue;
      ref(u);
      text(" is connected with ");
      list(next);
      text(". ");
    }
    for (const auto& [u, r] : g_.rewards) donation(u);
  }

  void question(NodeId start, NodeId goal) {
    text("From ");
    qref(start);
    text(" what is the shortest path to ");
    qref(goal);
    text("? Starting from ");
    qref(start);
    text(social_ ? ", please list the scholar names in order, including " : ", please list the room numbers in order, including ");
    bare(start);
    text(", separated by commas.");
  }

 private:
  void donation(NodeId u) {
    if (auto r = g_.rewards.find(u); r != g_.rewards.end()) {
      ref(u);
      text(" is donating " + std::to_string(r->second) +
           " books, but you do not take any books, you're just learning about the environment. ");
    }
  }

  const GraphSpec& g_;
  bool social_;
  const std::map<NodeId, std::string>& labels_;
  TextBuilder& b_;
};

void render_task(TraversalTask& t) {
  TextBuilder b;
  if (t.icl) b.mark("icl_example", kGraphIclPrefix);
  Renderer r(t.graph, t.domain, t.node_label_map, b);
  const std::size_t story = b.position();
  const auto shape = line_shape(t.graph);
  if (t.domain == Domain::kSocialTies) {
    shape ? r.social_line(*shape) : r.social_generic();
  } else {
    shape ? r.rooms_line(*shape) : r.rooms_generic();
  }
  b.add_span("narrative", {story, b.position()});
  const std::size_t q = b.position();
  r.question(t.start, t.goal);
  b.add_span("question", {q, b.position()});
  t.rendered = b.text();
  t.segments = b.segments();
}

}  // namespace

std::string TraversalTask::oracle_response() const {
  std::string out;
  for (NodeId u : oracle_path()) {
    if (!out.empty()) out += ", ";
    out += node_label_map.at(u);
  }
  return out;
}

SuiteRecord TraversalTask::to_record() const {
  SuiteRecord r;
  r.id = id;
  r.task = "graph";
  r.prompt_text = rendered;
  r.segments = segments;
  const int hops = static_cast<int>(oracle_path().size()) - 1;
  r.labels = {{"graph", graph.id},
              {"domain", to_string(domain)},
              {"condition", to_string(condition)},
              {"icl", icl ? "1" : "0"},
              {"start", std::to_string(start)},
              {"goal", std::to_string(goal)},
              {"hops", std::to_string(hops)},
              {"generation", std::to_string(generation_index)}};
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [u, l] : node_label_map) labels[std::to_string(u)] = l;
  r.answer = {{"graph", graph.to_json()}, {"start", start},   {"goal", goal},
              {"node_labels", labels},    {"hops", hops}};
  r.oracle_response = " " + oracle_response();
  return r;
}

TraversalTask TraversalTask::from_record(const SuiteRecord& record) {
  if (record.task != "graph") {
    throw Error(ErrorCode::kInvalidArgument, "record '" + record.id + "' is not a graph task");
  }
  TraversalTask t;
  try {
    t.id = record.id;
    t.graph = GraphSpec::from_json(record.answer.at("graph"));
    t.start = record.answer.at("start").get<NodeId>();
    t.goal = record.answer.at("goal").get<NodeId>();
    for (const auto& [k, v] : record.answer.at("node_labels").items()) t.node_label_map[std::stoi(k)] = v.get<std::string>();
    t.domain = parse_domain(record.labels.at("domain"));
    t.condition = parse_condition(record.labels.at("condition"));
    t.icl = record.labels.at("icl") == "1";
    t.generation_index = std::stoi(record.labels.at("generation"));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "record '" + record.id + "': malformed graph answer: " + e.what());
  }
  t.rendered = record.prompt_text;
  t.segments = record.segments;
  return t;
}

GraphSuite gen_graph_suite(const GraphSpec& graph, Domain domain, const std::set<Condition>& conditions,
                           bool with_icl, std::uint64_t seed, const std::filesystem::path& data_dir) {
  if (conditions.empty()) throw Error(ErrorCode::kEmptyConditionSet, "no traversal conditions requested");
  check_graph(graph);
  GraphSuite suite;
  const auto labels = node_labels(graph, domain, seed, data_dir);
  std::map<NodeId, std::map<NodeId, int>> dist;
  for (NodeId u : graph.nodes) dist[u] = bfs_distances(graph, u);

  for (Condition c : conditions) {
    const int hops = condition_hops(c, graph);
    std::vector<std::pair<NodeId, NodeId>> candidates;
    for (NodeId s : graph.nodes) {
      for (const auto& [g, d] : dist[s]) {
        if (d == hops && g != s) candidates.emplace_back(s, g);
      }
    }
    Rng rng(seed, static_cast<std::uint64_t>(c));
    rng.shuffle(std::span<std::pair<NodeId, NodeId>>(candidates));
    if (candidates.size() < kPairsPerCondition) {
      suite.warnings.push_back(graph.id + " " + to_string(c) + ": only " + std::to_string(candidates.size()) +
                               " start/goal pairs at distance " + std::to_string(hops));
    } else {
      candidates.resize(kPairsPerCondition);
    }
    for (std::size_t p = 0; p < candidates.size(); ++p) {
      for (int gen = 0; gen < kGenerationsPerCondition; ++gen) {
        TraversalTask t;
        t.id = graph.id + "_" + to_string(domain) + "_" + to_string(c) + (with_icl ? "_icl_" : "_") +
               std::to_string(p) + "_g" + std::to_string(gen);
        t.graph = graph;
        t.domain = domain;
        t.start = candidates[p].first;
        t.goal = candidates[p].second;
        t.condition = c;
        t.icl = with_icl;
        t.generation_index = gen;
        t.node_label_map = labels;
        render_task(t);
        suite.tasks.push_back(std::move(t));
      }
    }
  }
  return suite;
}

std::vector<NodeId> parse_traversal(const std::string& response, const std::map<NodeId, std::string>& labels) {
  std::map<std::string, NodeId> by_label;
  for (const auto& [u, l] : labels) by_label[text::to_lower(l)] = u;

  enum class Kind { kWord, kComma, kOther };
  std::vector<std::pair<Kind, std::string>> toks;
  const std::string s = text::to_lower(response);
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isalnum(c) || c >= 0x80) {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || static_cast<unsigned char>(s[j]) >= 0x80)) ++j;
      toks.emplace_back(Kind::kWord, s.substr(i, j - i));
      i = j;
    } else if (c == ',') {
      toks.emplace_back(Kind::kComma, ",");
      ++i;
    } else if (std::isspace(c)) {
      ++i;
    } else {
      toks.emplace_back(Kind::kOther, std::string(1, s[i]));
      ++i;
    }
  }
  auto is_filler = [](const std::string& w) { return w == "room" || w == "rooms" || w == "scholar" || w == "the"; };
  auto label_at = [&](std::size_t k) -> std::optional<NodeId> {
    if (k >= toks.size() || toks[k].first != Kind::kWord) return std::nullopt;
    auto it = by_label.find(toks[k].second);
    if (it == by_label.end()) return std::nullopt;
    return it->second;
  };

  for (std::size_t i = 0; i < toks.size(); ++i) {
    auto first = label_at(i);
    if (!first) continue;
    std::vector<NodeId> run{*first};
    std::size_t k = i + 1;
    while (true) {
      std::size_t j = k;
      bool separated = false;
      while (j < toks.size() && (toks[j].first == Kind::kComma || (toks[j].first == Kind::kWord && toks[j].second == "and"))) {
        separated = true;
        ++j;
      }
      if (!separated) break;
      while (j < toks.size() && toks[j].first == Kind::kWord && is_filler(toks[j].second)) ++j;
      auto next = label_at(j);
      if (!next) break;
      run.push_back(*next);
      k = j + 1;
    }
    if (run.size() >= 2) return run;
  }
  return {};
}

bool score_traversal(const std::string& response, const TraversalTask& task) {
  const auto path = parse_traversal(response, task.node_label_map);
  if (path.size() < 2 || path.front() != task.start || path.back() != task.goal) return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!task.graph.has_edge(path[i], path[i + 1])) return false;
  }
  const auto dist = bfs_distances(task.graph, task.start);
  const auto it = dist.find(task.goal);
  return it != dist.end() && path.size() == static_cast<std::size_t>(it->second) + 1;
}

}  // namespace iclscope::taskgen

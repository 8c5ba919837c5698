#include "gbfim/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "gbfim/error.hpp"
#include "gbfim/rng.hpp"

namespace gbfim {

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::optional<double> parse_double(std::string_view tok) {
  double value = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::optional<long long> parse_index(std::string_view tok) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || value < 0) return std::nullopt;
  return value;
}

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

}  // namespace

Graph::Graph(int node_count, std::vector<Edge> edges, std::optional<std::vector<Point2>> positions,
             std::vector<std::string> labels)
    : node_count_(node_count),
      edges_(std::move(edges)),
      positions_(std::move(positions)),
      labels_(std::move(labels)) {
  if (node_count_ < 1) throw Error(ErrorCode::kEmptyResult, "graph must have at least one node");
  if (positions_ && positions_->size() != static_cast<std::size_t>(node_count_))
    throw Error(ErrorCode::kDimensionMismatch, "position count does not match node count");
  if (!labels_.empty() && labels_.size() != static_cast<std::size_t>(node_count_))
    throw Error(ErrorCode::kDimensionMismatch, "label count does not match node count");

  std::set<std::pair<NodeId, NodeId>> seen;
  for (auto& e : edges_) {
    if (e.u < 0 || e.u >= node_count_ || e.v < 0 || e.v >= node_count_)
      throw Error(ErrorCode::kInvalidNode, "edge (" + std::to_string(e.u) + ", " +
                                               std::to_string(e.v) + ") references a missing node");
    if (e.u == e.v) throw Error(ErrorCode::kSelfLoop, "self-loop at node " + std::to_string(e.u));
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      throw Error(ErrorCode::kNonPositiveWeight, "edge (" + std::to_string(e.u) + ", " +
                                                     std::to_string(e.v) + ") has weight " +
                                                     std::to_string(e.w));
    if (e.v < e.u) std::swap(e.u, e.v);
    if (!seen.emplace(e.u, e.v).second)
      throw Error(ErrorCode::kDuplicateEdge, "duplicate edge (" + std::to_string(e.u) + ", " +
                                                 std::to_string(e.v) + ")");
  }

  const auto n = static_cast<std::size_t>(node_count_);
  std::vector<std::size_t> counts(n, 0);
  for (const auto& e : edges_) {
    ++counts[e.u];
    ++counts[e.v];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + counts[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    adjacency_[cursor[e.u]++] = {e.v, e.w, k};
    adjacency_[cursor[e.v]++] = {e.u, e.w, k};
  }
  degrees_.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    auto begin = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
    auto end = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
    std::sort(begin, end, [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    for (auto it = begin; it != end; ++it) degrees_[v] += it->weight;
  }
}

std::span<const Graph::Neighbor> Graph::neighbors(NodeId v) const {
  if (v < 0 || v >= node_count_) throw Error(ErrorCode::kInvalidNode, "node " + std::to_string(v));
  const auto i = static_cast<std::size_t>(v);
  return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

const std::vector<Point2>& Graph::positions() const {
  if (!positions_) throw Error(ErrorCode::kInvalidArgument, "graph has no node positions");
  return *positions_;
}

std::string Graph::label(NodeId v) const {
  if (labels_.empty()) return std::to_string(v);
  return labels_.at(static_cast<std::size_t>(v));
}

std::vector<int> Graph::connected_components() const {
  UnionFind uf(node_count_);
  for (const auto& e : edges_) uf.unite(e.u, e.v);
  std::vector<int> comp(static_cast<std::size_t>(node_count_));
  std::unordered_map<int, int> index;
  for (int v = 0; v < node_count_; ++v) {
    auto [it, inserted] = index.emplace(uf.find(v), static_cast<int>(index.size()));
    comp[v] = it->second;
  }
  return comp;
}

int Graph::component_count() const {
  const auto comp = connected_components();
  return comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
}

std::uint64_t Graph::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      h ^= (word >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  std::vector<Edge> sorted(edges_.begin(), edges_.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
  feed(static_cast<std::uint64_t>(node_count_));
  for (const auto& e : sorted) {
    feed(static_cast<std::uint64_t>(e.u));
    feed(static_cast<std::uint64_t>(e.v));
    std::uint64_t bits = 0;
    static_assert(sizeof(bits) == sizeof(e.w));
    std::memcpy(&bits, &e.w, sizeof(bits));
    feed(bits);
  }
  return h;
}

LaplacianKind parse_laplacian_kind(std::string_view text) {
  if (text == "standard") return LaplacianKind::kStandard;
  if (text == "normalized") return LaplacianKind::kNormalized;
  throw Error(ErrorCode::kInvalidArgument, "unknown Laplacian kind '" + std::string(text) + "'");
}

std::string_view to_string(LaplacianKind kind) {
  return kind == LaplacianKind::kStandard ? "standard" : "normalized";
}

GraphFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? GraphFormat::kJson : GraphFormat::kEdgeList;
}

Graph load_graph(const std::filesystem::path& path) { return load_graph(path, format_for_path(path)); }

Graph load_graph(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open graph file " + path.string());
  if (format == GraphFormat::kEdgeList) return parse_edge_list(in);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return parse_graph_json(doc);
}

Graph parse_edge_list(std::istream& in) {
  struct Row {
    std::string u, v;
    double w;
    std::size_t line;
  };
  std::vector<Row> rows;
  bool integer_ids = true;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream ls(text);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() > 3 || tokens.size() < 2)
      throw Error(ErrorCode::kParse, at_line(line_no) + "expected 'u v [w]', got " +
                                         std::to_string(tokens.size()) + " fields");
    double w = 1.0;
    if (tokens.size() == 3) {
      auto parsed = parse_double(tokens[2]);
      if (!parsed) throw Error(ErrorCode::kParse, at_line(line_no) + "bad weight '" + tokens[2] + "'");
      w = *parsed;
      if (!(w > 0.0) || !std::isfinite(w))
        throw Error(ErrorCode::kNonPositiveWeight, at_line(line_no) + "weight must be positive");
    }
    if (tokens[0] == tokens[1])
      throw Error(ErrorCode::kSelfLoop, at_line(line_no) + "self-loop at '" + tokens[0] + "'");
    integer_ids = integer_ids && parse_index(tokens[0]) && parse_index(tokens[1]);
    rows.push_back({tokens[0], tokens[1], w, line_no});
  }
  if (rows.empty()) throw Error(ErrorCode::kParse, "edge list contains no edges");

  std::vector<Edge> edges;
  edges.reserve(rows.size());
  std::vector<std::string> labels;
  int n = 0;
  if (integer_ids) {
    long long max_id = 0;
    for (const auto& r : rows) max_id = std::max({max_id, *parse_index(r.u), *parse_index(r.v)});
    if (max_id >= std::numeric_limits<int>::max())
      throw Error(ErrorCode::kParse, "node id " + std::to_string(max_id) + " too large");
    n = static_cast<int>(max_id) + 1;
    for (const auto& r : rows)
      edges.push_back({static_cast<NodeId>(*parse_index(r.u)), static_cast<NodeId>(*parse_index(r.v)), r.w});
  } else {
    std::unordered_map<std::string, NodeId> ids;
    auto id_of = [&](const std::string& label) {
      auto [it, inserted] = ids.emplace(label, static_cast<NodeId>(labels.size()));
      if (inserted) labels.push_back(label);
      return it->second;
    };
    for (const auto& r : rows) {
      const NodeId u = id_of(r.u);
      edges.push_back({u, id_of(r.v), r.w});
    }
    n = static_cast<int>(labels.size());
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto key = std::minmax(edges[i].u, edges[i].v);
    if (!seen.emplace(key).second)
      throw Error(ErrorCode::kDuplicateEdge, at_line(rows[i].line) + "duplicate edge " + rows[i].u +
                                                 " " + rows[i].v);
  }
  return Graph(n, std::move(edges), std::nullopt, std::move(labels));
}

Graph parse_graph_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw Error(ErrorCode::kParse, "graph JSON must be an object");
    std::vector<long long> raw_ids;
    std::vector<std::optional<Point2>> raw_pos;
    if (doc.contains("nodes")) {
      for (const auto& node : doc.at("nodes")) {
        raw_ids.push_back(node.at("id").get<long long>());
        if (node.contains("pos")) {
          const auto& p = node.at("pos");
          if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::kParse, "pos must be [x, y]");
          raw_pos.emplace_back(Point2{p[0].get<double>(), p[1].get<double>()});
        } else {
          raw_pos.emplace_back(std::nullopt);
        }
      }
    }
    struct RawEdge {
      long long u, v;
      double w;
    };
    std::vector<RawEdge> raw_edges;
    if (doc.contains("edges")) {
      for (const auto& e : doc.at("edges")) {
        double w = e.contains("w") ? e.at("w").get<double>() : 1.0;
        raw_edges.push_back({e.at("u").get<long long>(), e.at("v").get<long long>(), w});
      }
    }

    if (raw_ids.empty()) {
      long long max_id = -1;
      for (const auto& e : raw_edges) max_id = std::max({max_id, e.u, e.v});
      for (long long i = 0; i <= max_id; ++i) raw_ids.push_back(i);
      raw_pos.assign(raw_ids.size(), std::nullopt);
    }

    std::map<long long, NodeId> dense;
    for (auto id : raw_ids) {
      if (!dense.emplace(id, 0).second)
        throw Error(ErrorCode::kParse, "duplicate node id " + std::to_string(id));
    }
    // Sorted order gives the dense ids; identity when ids are 0..n-1.
    NodeId next = 0;
    bool identity = true;
    for (auto& [id, dense_id] : dense) {
      identity = identity && id == next;
      dense_id = next++;
    }
    const int n = static_cast<int>(dense.size());

    std::vector<std::string> labels;
    if (!identity) {
      labels.resize(static_cast<std::size_t>(n));
      for (const auto& [id, dense_id] : dense) labels[dense_id] = std::to_string(id);
    }

    std::optional<std::vector<Point2>> positions;
    const auto with_pos = std::count_if(raw_pos.begin(), raw_pos.end(), [](const auto& p) { return p.has_value(); });
    if (with_pos != 0) {
      if (static_cast<std::size_t>(with_pos) != raw_pos.size())
        throw Error(ErrorCode::kParse, "positions must be given for all nodes or none");
      positions.emplace(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < raw_ids.size(); ++i) (*positions)[dense.at(raw_ids[i])] = *raw_pos[i];
    }

    std::vector<Edge> edges;
    edges.reserve(raw_edges.size());
    for (const auto& e : raw_edges) {
      auto u = dense.find(e.u);
      auto v = dense.find(e.v);
      if (u == dense.end() || v == dense.end())
        throw Error(ErrorCode::kInvalidNode, "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                                                 ") references an undeclared node");
      edges.push_back({u->second, v->second, e.w});
    }
    return Graph(n, std::move(edges), std::move(positions), std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("graph JSON: ") + e.what());
  }
}

nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId v = 0; v < g.node_count(); ++v) {
    nlohmann::json node = {{"id", v}};
    if (g.has_positions()) node["pos"] = {g.positions()[v].x, g.positions()[v].y};
    if (!g.labels().empty()) node["label"] = g.labels()[v];
    nodes.push_back(std::move(node));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({{"u", e.u}, {"v", e.v}, {"w", e.w}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

void save_graph_json(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out << graph_to_json(g).dump(1) << '\n';
}

std::vector<Point2> load_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open point file " + path.string());
  std::vector<Point2> points;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::replace(text.begin(), text.end(), ',', ' ');
    std::istringstream ls(text);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() < 2) throw Error(ErrorCode::kParse, at_line(line_no) + "expected 'x y'");
    auto x = parse_double(tokens[0]);
    auto y = parse_double(tokens[1]);
    // A non-numeric first row is a header.
    if (!x || !y) {
      if (points.empty() && line_no == 1) continue;
      throw Error(ErrorCode::kParse, at_line(line_no) + "bad coordinate");
    }
    points.push_back({*x, *y});
  }
  return points;
}

Graph generate_points_graph(std::span<const Point2> points, double thin_radius, double link_radius) {
  if (!(link_radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "link radius must be positive");
  if (thin_radius < 0.0) throw Error(ErrorCode::kInvalidArgument, "thinning radius must be nonnegative");

  std::vector<Point2> kept;
  for (const auto& p : points) {
    bool far = std::all_of(kept.begin(), kept.end(),
                           [&](const Point2& q) { return distance(p, q) >= thin_radius; });
    if (far) kept.push_back(p);
  }
  if (kept.empty()) throw Error(ErrorCode::kEmptyResult, "no points survive thinning");

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j)
      if (distance(kept[i], kept[j]) <= link_radius)
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
  const int n = static_cast<int>(kept.size());
  return Graph(n, std::move(edges), std::move(kept));
}

std::vector<Point2> uniform_points(int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::kEmptyResult, "point count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<Point2> points(static_cast<std::size_t>(count));
  for (auto& p : points) {
    p.x = uniform01(rng);
    p.y = uniform01(rng);
  }
  return points;
}

Graph generate_sensor_graph(const SensorOptions& options) {
  auto points = uniform_points(options.count, options.seed);
  const int n = options.count;
  std::set<std::pair<NodeId, NodeId>> links;
  auto link = [&links](NodeId a, NodeId b) { links.emplace(std::min(a, b), std::max(a, b)); };

  if (options.link_radius > 0.0) {
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j)
        if (distance(points[i], points[j]) <= options.link_radius) link(i, j);
  } else {
    if (options.knn < 1) throw Error(ErrorCode::kInvalidArgument, "knn must be at least 1");
    for (NodeId i = 0; i < n; ++i) {
      std::vector<std::pair<double, NodeId>> order;
      for (NodeId j = 0; j < n; ++j)
        if (j != i) order.emplace_back(distance(points[i], points[j]), j);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(options.knn), order.size());
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
      for (std::size_t r = 0; r < k; ++r) link(i, order[r].second);
    }
  }

  if (options.connect) {
    UnionFind uf(n);
    for (const auto& [a, b] : links) uf.unite(a, b);
    while (true) {
      // Shortest edge from the component of node 0 to any other component.
      const int root = uf.find(0);
      double best = std::numeric_limits<double>::infinity();
      std::pair<NodeId, NodeId> best_pair{-1, -1};
      for (NodeId i = 0; i < n; ++i) {
        if (uf.find(i) != root) continue;
        for (NodeId j = 0; j < n; ++j) {
          if (uf.find(j) == root) continue;
          const double d = distance(points[i], points[j]);
          if (d < best) {
            best = d;
            best_pair = {i, j};
          }
        }
      }
      if (best_pair.first < 0) break;
      link(best_pair.first, best_pair.second);
      uf.unite(best_pair.first, best_pair.second);
    }
  }

  std::vector<Edge> edges;
  edges.reserve(links.size());
  for (const auto& [a, b] : links) edges.push_back({a, b, 1.0});
  return Graph(n, std::move(edges), std::move(points));
}

Eigen::MatrixXd laplacian(const Graph& g, LaplacianKind kind) {
  const Eigen::Index n = g.node_count();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    L(e.u, e.v) -= e.w;
    L(e.v, e.u) -= e.w;
  }
  for (Eigen::Index v = 0; v < n; ++v) L(v, v) = g.degree(static_cast<NodeId>(v));
  if (kind == LaplacianKind::kStandard) return L;

  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index v = 0; v < n; ++v) {
    const double d = g.degree(static_cast<NodeId>(v));
    if (!(d > 0.0))
      throw Error(ErrorCode::kIsolatedNode,
                  "normalized Laplacian undefined: node " + std::to_string(v) + " is isolated");
    inv_sqrt(v) = 1.0 / std::sqrt(d);
  }
  for (const auto& e : g.edges()) {
    const double value = -e.w * (inv_sqrt(e.u) * inv_sqrt(e.v));
    L(e.u, e.v) = value;
    L(e.v, e.u) = value;
  }
  L.diagonal().setOnes();
  return L;
}

std::vector<NodeId> degree_top_n(const Graph& g, int count) {
  if (count < 1 || count > g.node_count())
    throw Error(ErrorCode::kBudgetInfeasible, "requested " + std::to_string(count) + " of " +
                                                  std::to_string(g.node_count()) + " nodes");
  std::vector<NodeId> order(static_cast<std::size_t>(g.node_count()));
  std::iota(order.begin(), order.end(), 0);
  const auto& deg = g.degrees();
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return deg[a] > deg[b]; });
  order.resize(static_cast<std::size_t>(count));
  return order;
}

}  // namespace gbfim

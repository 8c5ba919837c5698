#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace gbfim {

using NodeId = int;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Weighted undirected simple graph on nodes 0..n-1.
///
/// Construction validates the invariants (no self-loops, no parallel edges,
/// strictly positive weights, ids in range) and throws gbfim::Error
/// otherwise. Edges are stored with u < v. The object is immutable.
class Graph {
 public:
  struct Neighbor {
    NodeId node;
    double weight;
    std::size_t edge;  // index into edges()
  };

  Graph(int node_count, std::vector<Edge> edges,
        std::optional<std::vector<Point2>> positions = std::nullopt,
        std::vector<std::string> labels = {});

  int node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Neighbor> neighbors(NodeId v) const;
  double degree(NodeId v) const { return degrees_.at(static_cast<std::size_t>(v)); }
  const std::vector<double>& degrees() const noexcept { return degrees_; }

  bool has_positions() const noexcept { return positions_.has_value(); }
  const std::vector<Point2>& positions() const;

  /// External labels; empty when node ids are the labels.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::string label(NodeId v) const;

  /// Component index per node, components numbered by smallest member.
  std::vector<int> connected_components() const;
  int component_count() const;

  /// FNV-1a digest of the node count and the sorted weighted edge set.
  std::uint64_t fingerprint() const;

 private:
  int node_count_;
  std::vector<Edge> edges_;
  std::optional<std::vector<Point2>> positions_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> degrees_;
};

enum class LaplacianKind { kStandard, kNormalized };

LaplacianKind parse_laplacian_kind(std::string_view text);
std::string_view to_string(LaplacianKind kind);

enum class GraphFormat { kEdgeList, kJson };

/// ".json" selects JSON, anything else the edge-list format.
GraphFormat format_for_path(const std::filesystem::path& path);

Graph load_graph(const std::filesystem::path& path, GraphFormat format);
Graph load_graph(const std::filesystem::path& path);

/// "u v [w]" per line, '#' comments. Integer tokens are used as ids
/// directly; if any token is not a non-negative integer every token is
/// treated as a label and mapped to ids in order of first appearance.
Graph parse_edge_list(std::istream& in);
Graph parse_graph_json(const nlohmann::json& doc);

nlohmann::json graph_to_json(const Graph& g);
void save_graph_json(const Graph& g, const std::filesystem::path& path);

/// One point per line, "x y" or "x,y"; blank lines and '#' comments skipped.
std::vector<Point2> load_points(const std::filesystem::path& path);

/// Greedy thinning in input order followed by radius linking (weight 1).
Graph generate_points_graph(std::span<const Point2> points, double thin_radius,
                            double link_radius);

/// `count` points uniform in the unit square. Coordinates are drawn from
/// std::mt19937_64(seed) as x = (r >> 11) * 2^-53, then y likewise.
std::vector<Point2> uniform_points(int count, std::uint64_t seed);

struct SensorOptions {
  int count = 79;
  std::uint64_t seed = 7;
  /// Link each node to its k nearest neighbours (symmetrised). Ignored when
  /// link_radius > 0.
  int knn = 4;
  double link_radius = 0.0;
  /// Join components by repeatedly adding the shortest edge between the
  /// component of the lowest node and the rest.
  bool connect = true;
};

/// Random sensor-style graph on uniform points in the unit square.
Graph generate_sensor_graph(const SensorOptions& options);

Eigen::MatrixXd laplacian(const Graph& g, LaplacianKind kind = LaplacianKind::kStandard);

/// Nodes by descending weighted degree, ties by ascending id.
std::vector<NodeId> degree_top_n(const Graph& g, int count);

}  // namespace gbfim

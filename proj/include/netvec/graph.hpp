#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netvec {

using NodeId = std::uint32_t;

struct Neighbor {
  NodeId id;
  double weight;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct Edge {
  NodeId u;
  NodeId v;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Immutable compressed adjacency over node ids [0, num_nodes).
//
// Undirected graphs store every edge in both endpoint lists with the same
// weight. Adjacency lists are sorted by neighbor id and free of duplicates;
// self-loops and non-positive weights are rejected at construction.
class Graph {
 public:
  Graph() = default;

  // Duplicate (u, v) pairs are collapsed by summing their weights. For
  // undirected graphs (u, v) and (v, u) name the same edge.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                          bool directed = false);

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  // Number of stored arcs for directed graphs, unordered edges otherwise.
  std::size_t num_edges() const noexcept { return directed_ ? arcs_.size() : arcs_.size() / 2; }
  bool directed() const noexcept { return directed_; }

  std::span<const Neighbor> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const;
  std::size_t max_degree() const noexcept { return max_degree_; }

  bool has_edge(NodeId u, NodeId v) const;
  // Weight of arc u -> v, or 0 when absent.
  double edge_weight(NodeId u, NodeId v) const;

  // All edges; undirected edges are reported once with u < v. Sorted by (u, v).
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  void check_node(NodeId v) const;

  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> arcs_;
  std::size_t max_degree_ = 0;
  bool directed_ = false;
};

// Bijection between external string labels and internal ids.
class NodeIdMap {
 public:
  NodeIdMap() = default;

  // Labels "0" .. "n-1".
  static NodeIdMap identity(std::size_t n);

  // Returns the id for `label`, assigning the next free id if it is new.
  NodeId intern(std::string_view label);
  std::optional<NodeId> find(std::string_view label) const;
  const std::string& label(NodeId id) const;
  std::size_t size() const noexcept { return labels_.size(); }

  void write_tsv(std::ostream& out) const;
  static NodeIdMap read_tsv(std::istream& in);

  friend bool operator==(const NodeIdMap& a, const NodeIdMap& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

struct LoadOptions {
  bool directed = false;
  // When false a third column is ignored and every edge has weight 1.
  bool weighted = true;
};

struct LoadedGraph {
  Graph graph;
  NodeIdMap ids;
  std::size_t skipped_self_loops = 0;
};

// Parses "u v" / "u v w" lines; blank lines and lines starting with '#' are
// ignored. Throws ParseError for malformed lines or non-positive weights and
// Error for input without any edge line.
LoadedGraph load_edge_list(std::istream& in, const LoadOptions& options = {});
LoadedGraph load_edge_list_file(const std::string& path, const LoadOptions& options = {});

// Writes "label label weight" lines that load_edge_list reads back exactly.
void write_edge_list(std::ostream& out, const Graph& g, const NodeIdMap& ids);

std::size_t degree(const Graph& g, NodeId v);
bool is_connected(const Graph& g);

struct EdgeRemoval {
  Graph residual;
  std::vector<Edge> removed;
  std::size_t requested = 0;

  bool shortfall() const noexcept { return removed.size() < requested; }
};

// Removes round(fraction * |E|) edges in a seeded random order, skipping every
// edge whose removal would disconnect the residual graph.
EdgeRemoval remove_edges_keep_connected(const Graph& g, double fraction, std::uint64_t seed);

}  // namespace netvec

#include "netvec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "detail/text.hpp"
#include "netvec/error.hpp"
#include "netvec/random.hpp"

namespace netvec {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges, bool directed) {
  struct Arc {
    NodeId src;
    NodeId dst;
    double weight;
  };
  std::vector<Arc> arcs;
  arcs.reserve(directed ? edges.size() : 2 * edges.size());
  for (const Edge& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw Error("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                  ") references a node outside [0, " + std::to_string(num_nodes) + ")");
    }
    if (e.u == e.v) throw Error("self-loop on node " + std::to_string(e.u));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw Error("edge weight must be positive and finite");
    }
    arcs.push_back({e.u, e.v, e.weight});
    if (!directed) arcs.push_back({e.v, e.u, e.weight});
  }
  // Stable so that duplicate weights are summed in input order in both directions.
  std::stable_sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });

  Graph g;
  g.directed_ = directed;
  g.offsets_.assign(num_nodes + 1, 0);
  g.arcs_.reserve(arcs.size());
  for (std::size_t i = 0; i < arcs.size();) {
    std::size_t j = i;
    double weight = 0.0;
    while (j < arcs.size() && arcs[j].src == arcs[i].src && arcs[j].dst == arcs[i].dst) {
      weight += arcs[j].weight;
      ++j;
    }
    g.arcs_.push_back({arcs[i].dst, weight});
    ++g.offsets_[arcs[i].src + 1];
    i = j;
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  for (std::size_t v = 0; v < num_nodes; ++v) {
    g.max_degree_ = std::max(g.max_degree_, g.offsets_[v + 1] - g.offsets_[v]);
  }
  return g;
}

void Graph::check_node(NodeId v) const {
  if (v >= num_nodes()) {
    throw Error("invalid node id " + std::to_string(v) + " (graph has " +
                std::to_string(num_nodes()) + " nodes)");
  }
}

std::span<const Neighbor> Graph::neighbors(NodeId v) const {
  check_node(v);
  return {arcs_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::size_t Graph::degree(NodeId v) const {
  check_node(v);
  return offsets_[v + 1] - offsets_[v];
}

double Graph::edge_weight(NodeId u, NodeId v) const {
  auto nbrs = neighbors(u);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                             [](const Neighbor& n, NodeId id) { return n.id < id; });
  return (it != nbrs.end() && it->id == v) ? it->weight : 0.0;
}

bool Graph::has_edge(NodeId u, NodeId v) const { return edge_weight(u, v) > 0.0; }

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (const Neighbor& n : neighbors(u)) {
      if (directed_ || u < n.id) out.push_back({u, n.id, n.weight});
    }
  }
  return out;
}

NodeIdMap NodeIdMap::identity(std::size_t n) {
  NodeIdMap map;
  for (std::size_t i = 0; i < n; ++i) map.intern(std::to_string(i));
  return map;
}

NodeId NodeIdMap::intern(std::string_view label) {
  auto [it, inserted] = index_.try_emplace(std::string(label), static_cast<NodeId>(labels_.size()));
  if (inserted) labels_.emplace_back(label);
  return it->second;
}

std::optional<NodeId> NodeIdMap::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& NodeIdMap::label(NodeId id) const {
  if (id >= labels_.size()) throw Error("no label for node id " + std::to_string(id));
  return labels_[id];
}

void NodeIdMap::write_tsv(std::ostream& out) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) out << labels_[i] << '\t' << i << '\n';
}

NodeIdMap NodeIdMap::read_tsv(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    auto fields = detail::split_fields(line);
    auto id = fields.size() == 2 ? detail::parse_number<std::size_t>(fields[1]) : std::nullopt;
    if (!id) throw ParseError(line_no, "expected '<label>\\t<id>'");
    rows.emplace_back(*id, std::string(fields[0]));
  }
  std::sort(rows.begin(), rows.end());
  NodeIdMap map;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != i) throw Error("node ids in map are not contiguous from 0");
    if (map.find(rows[i].second)) throw Error("duplicate label '" + rows[i].second + "'");
    map.intern(rows[i].second);
  }
  return map;
}

LoadedGraph load_edge_list(std::istream& in, const LoadOptions& options) {
  LoadedGraph result;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  std::size_t edge_lines = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError(line_no, "expected 'u v' or 'u v w', got " + std::to_string(fields.size()) +
                                    " fields");
    }
    double weight = 1.0;
    if (fields.size() == 3) {
      auto w = detail::parse_number<double>(fields[2]);
      if (!w || !std::isfinite(*w)) throw ParseError(line_no, "invalid weight '" + std::string(fields[2]) + "'");
      if (*w <= 0.0) throw ParseError(line_no, "weight must be positive");
      if (options.weighted) weight = *w;
    }
    ++edge_lines;
    const NodeId u = result.ids.intern(fields[0]);
    const NodeId v = result.ids.intern(fields[1]);
    if (u == v) {
      ++result.skipped_self_loops;
      continue;
    }
    edges.push_back({u, v, weight});
  }
  if (edge_lines == 0) throw Error("edge list is empty");
  result.graph = Graph::from_edges(result.ids.size(), edges, options.directed);
  return result;
}

LoadedGraph load_edge_list_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list '" + path + "'");
  return load_edge_list(in, options);
}

void write_edge_list(std::ostream& out, const Graph& g, const NodeIdMap& ids) {
  for (const Edge& e : g.edges()) {
    out << ids.label(e.u) << ' ' << ids.label(e.v) << ' ' << detail::format_double(e.weight) << '\n';
  }
}

std::size_t degree(const Graph& g, NodeId v) { return g.degree(v); }

bool is_connected(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : g.neighbors(v)) {
      if (!seen[nb.id]) {
        seen[nb.id] = 1;
        ++reached;
        stack.push_back(nb.id);
      }
    }
  }
  return reached == n;
}

namespace {

// Mutable unweighted adjacency used while deleting edges.
class EdgeSet {
 public:
  explicit EdgeSet(const Graph& g) : adj_(g.num_nodes()), mark_(g.num_nodes(), 0) {
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      for (const Neighbor& nb : g.neighbors(v)) adj_[v].push_back(nb.id);
    }
  }

  void erase(NodeId u, NodeId v) {
    std::erase(adj_[u], v);
    std::erase(adj_[v], u);
  }

  void insert(NodeId u, NodeId v) {
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }

  bool reachable(NodeId from, NodeId to) {
    ++stamp_;
    stack_.assign(1, from);
    mark_[from] = stamp_;
    while (!stack_.empty()) {
      NodeId x = stack_.back();
      stack_.pop_back();
      if (x == to) return true;
      for (NodeId y : adj_[x]) {
        if (mark_[y] != stamp_) {
          mark_[y] = stamp_;
          stack_.push_back(y);
        }
      }
    }
    return false;
  }

 private:
  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::uint64_t> mark_;
  std::vector<NodeId> stack_;
  std::uint64_t stamp_ = 0;
};

}  // namespace

EdgeRemoval remove_edges_keep_connected(const Graph& g, double fraction, std::uint64_t seed) {
  if (g.directed()) throw Error("edge removal requires an undirected graph");
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error("removal fraction must lie in (0, 1)");
  if (!is_connected(g)) throw Error("edge removal requires a connected graph");

  const std::vector<Edge> edges = g.edges();
  EdgeRemoval result;
  result.requested = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(edges.size())));

  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, {0x7265'6d6f'7665ULL}));
  std::shuffle(order.begin(), order.end(), rng);

  EdgeSet live(g);
  std::vector<char> removed(edges.size(), 0);
  for (std::size_t idx : order) {
    if (result.removed.size() == result.requested) break;
    const Edge& e = edges[idx];
    live.erase(e.u, e.v);
    if (live.reachable(e.u, e.v)) {
      removed[idx] = 1;
      result.removed.push_back(e);
    } else {
      live.insert(e.u, e.v);
    }
  }

  std::vector<Edge> kept;
  kept.reserve(edges.size() - result.removed.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!removed[i]) kept.push_back(edges[i]);
  }
  result.residual = Graph::from_edges(g.num_nodes(), kept, false);
  return result;
}

}  // namespace netvec

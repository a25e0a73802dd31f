#include "netvec/generators.hpp"

#include <set>
#include <utility>

#include "netvec/error.hpp"
#include "netvec/random.hpp"

namespace netvec {

BlockModel stochastic_block_model(const std::vector<std::size_t>& block_sizes, double p_in,
                                  double p_out, std::uint64_t seed) {
  if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0) {
    throw Error("block model probabilities must lie in [0, 1]");
  }
  BlockModel model;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    model.block.insert(model.block.end(), block_sizes[b], static_cast<int>(b));
  }
  const std::size_t n = model.block.size();
  Rng rng(derive_seed(seed, {0x73626dULL}));
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double p = model.block[u] == model.block[v] ? p_in : p_out;
      if (uniform01(rng) < p) edges.push_back({u, v, 1.0});
    }
  }
  model.graph = Graph::from_edges(n, edges);
  return model;
}

Graph gnm_random_graph(std::size_t num_nodes, std::size_t num_edges, std::uint64_t seed) {
  if (num_nodes < 2 || num_edges > num_nodes * (num_nodes - 1) / 2) {
    throw Error("too many edges requested for a simple graph");
  }
  Rng rng(derive_seed(seed, {0x676e6dULL}));
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(num_nodes - 1));
  std::set<std::pair<NodeId, NodeId>> chosen;
  std::vector<Edge> edges;
  edges.reserve(num_edges);
  while (edges.size() < num_edges) {
    NodeId u = pick(rng);
    NodeId v = pick(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (chosen.emplace(u, v).second) edges.push_back({u, v, 1.0});
  }
  return Graph::from_edges(num_nodes, edges);
}

}  // namespace netvec

#pragma once

#include <cstdint>
#include <vector>

#include "netvec/graph.hpp"

namespace netvec {

struct BlockModel {
  Graph graph;
  std::vector<int> block;  // block index per node
};

// Undirected stochastic block model: nodes are assigned to blocks in id
// order; each pair is linked with p_in inside a block and p_out across.
BlockModel stochastic_block_model(const std::vector<std::size_t>& block_sizes, double p_in,
                                  double p_out, std::uint64_t seed);

// Uniform random simple undirected graph with exactly num_edges edges.
Graph gnm_random_graph(std::size_t num_nodes, std::size_t num_edges, std::uint64_t seed);

}  // namespace netvec

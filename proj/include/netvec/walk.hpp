#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "netvec/graph.hpp"
#include "netvec/random.hpp"

namespace netvec {

enum class WalkOrder { first, second };

struct WalkConfig {
  WalkOrder order = WalkOrder::first;
  std::size_t num_walks = 10;
  std::size_t walk_length = 80;
  double p = 1.0;      // return to the previous node
  double q = 1.0;      // common neighbor of previous and current node
  double alpha = 1.0;  // new neighbor
  double jump_rate = 0.0;
  std::size_t jump_top_k = 10;
  std::size_t degree_bins = 100;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  // Throws Error when a field is out of range.
  void validate() const;
};

// Per-node histogram of the degrees of the node and its neighbors over
// equal-width bins spanning [1, max_degree]; degree 0 falls into bin 0.
class StructuralProfiles {
 public:
  StructuralProfiles(std::size_t num_nodes, std::size_t num_bins)
      : num_bins_(num_bins), values_(num_nodes * num_bins, 0.0) {}

  std::size_t num_nodes() const noexcept { return num_bins_ ? values_.size() / num_bins_ : 0; }
  std::size_t num_bins() const noexcept { return num_bins_; }
  std::span<const double> operator[](NodeId v) const { return {values_.data() + v * num_bins_, num_bins_}; }
  std::span<double> operator[](NodeId v) { return {values_.data() + v * num_bins_, num_bins_}; }

 private:
  std::size_t num_bins_;
  std::vector<double> values_;
};

std::size_t degree_bin(std::size_t degree, std::size_t max_degree, std::size_t num_bins);
std::vector<double> structural_profile(const Graph& g, NodeId v, std::size_t num_bins = 100);
StructuralProfiles structural_profiles(const Graph& g, std::size_t num_bins = 100, std::size_t threads = 1);

// Jensen-Shannon divergence in bits between two probability vectors of equal
// length. Throws Error if either vector does not sum to 1 within 1e-6.
double jsd(std::span<const double> pa, std::span<const double> pb);

struct JumpCandidate {
  NodeId node;
  double weight;
};

// For each node, the most structurally similar other nodes with roulette
// weights exp(-jsd), sorted by descending weight then ascending id.
class JumpTable {
 public:
  JumpTable() = default;
  explicit JumpTable(std::vector<std::vector<JumpCandidate>> candidates);

  std::size_t num_nodes() const noexcept { return candidates_.size(); }
  std::span<const JumpCandidate> candidates(NodeId v) const { return candidates_.at(v); }
  // Roulette draw over the candidates of v; v must have at least one.
  NodeId draw(NodeId v, Rng& rng) const;

 private:
  std::vector<std::vector<JumpCandidate>> candidates_;
  std::vector<std::vector<double>> cumulative_;
};

JumpTable build_jump_table(const Graph& g, const StructuralProfiles& profiles, std::size_t top_k,
                           std::size_t threads = 1);

// Next-step distribution over g.neighbors(cur) given the previous node:
// mass edge_weight * {p if x == prev, q if x is also adjacent to prev, alpha otherwise}.
std::vector<double> transition_distribution_second_order(const Graph& g, NodeId prev, NodeId cur,
                                                         double p, double q, double alpha);

class WalkCorpus {
 public:
  std::size_t size() const noexcept { return offsets_.size() - 1; }
  bool empty() const noexcept { return size() == 0; }
  std::span<const NodeId> operator[](std::size_t i) const {
    return {tokens_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t total_tokens() const noexcept { return tokens_.size(); }

  void add(std::span<const NodeId> walk);

  friend bool operator==(const WalkCorpus&, const WalkCorpus&) = default;

 private:
  std::vector<NodeId> tokens_;
  std::vector<std::size_t> offsets_{0};
};

// A single walk from `start`. `jumps` may be null when cfg.jump_rate == 0.
std::vector<NodeId> generate_walk(const Graph& g, NodeId start, const WalkConfig& cfg,
                                  const JumpTable* jumps, Rng& rng);

// num_walks passes; each pass starts one walk at every node with degree >= 1
// in a shuffled order. Every walk draws from its own stream derived from
// (seed, pass, start), so the result does not depend on cfg.threads.
WalkCorpus generate_corpus(const Graph& g, const WalkConfig& cfg);
WalkCorpus generate_corpus(const Graph& g, const WalkConfig& cfg, const JumpTable* jumps);

// One walk per line, space-separated internal ids.
void write_corpus(std::ostream& out, const WalkCorpus& corpus);
WalkCorpus read_corpus(std::istream& in);

}  // namespace netvec

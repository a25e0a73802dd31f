#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netvec/cooccurrence.hpp"
#include "netvec/evaluation.hpp"
#include "netvec/graph.hpp"
#include "netvec/walk.hpp"

namespace testsupport {

using netvec::Edge;
using netvec::Graph;
using netvec::NodeId;

inline std::string data_path(const std::string& name) { return std::string(NETVEC_DATA_DIR) + "/" + name; }

inline netvec::LoadedGraph karate() { return netvec::load_edge_list_file(data_path("karate.edgelist")); }

// Faction per internal id of `ids`.
inline std::vector<int> karate_factions(const netvec::NodeIdMap& ids) {
  std::ifstream in(data_path("karate.factions.tsv"));
  if (!in) throw std::runtime_error("missing karate factions");
  std::vector<int> out(ids.size(), -1);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string node;
    int faction;
    fields >> node >> faction;
    out[*ids.find(node)] = faction;
  }
  return out;
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph::from_edges(n, e);
}

inline Graph cycle_graph(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i) e.push_back({i, static_cast<NodeId>((i + 1) % n)});
  return Graph::from_edges(n, e);
}

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) e.push_back({i, j});
  return Graph::from_edges(n, e);
}

inline Graph star_graph(std::size_t leaves) {
  std::vector<Edge> e;
  for (NodeId i = 1; i <= leaves; ++i) e.push_back({0, i});
  return Graph::from_edges(leaves + 1, e);
}

// Exact non-negative rational with 64-bit parts.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational& operator+=(Rational o) {
    const std::int64_t l = std::lcm(den, o.den);
    num = num * (l / den) + o.num * (l / o.den);
    den = l;
    const std::int64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    return *this;
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Direct double loop over all position pairs of every walk.
inline std::map<std::pair<NodeId, NodeId>, Rational> brute_cooccurrence(const std::vector<std::vector<NodeId>>& walks,
                                                                        std::size_t window) {
  std::map<std::pair<NodeId, NodeId>, Rational> c;
  for (const auto& w : walks) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        const std::size_t d = j - i;
        if (d > window || w[i] == w[j]) continue;
        c[{w[i], w[j]}] += Rational{1, static_cast<std::int64_t>(d)};
        c[{w[j], w[i]}] += Rational{1, static_cast<std::int64_t>(d)};
      }
    }
  }
  return c;
}

// Micro/macro F1 from an explicit per-class confusion count.
inline netvec::F1Scores brute_f1(const std::vector<std::vector<int>>& truth,
                                 const std::vector<std::vector<int>>& predicted, std::size_t num_classes,
                                 const std::vector<bool>& counted) {
  std::vector<long> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      bool t = false, p = false;
      for (int x : truth[i]) t = t || x == static_cast<int>(c);
      for (int x : predicted[i]) p = p || x == static_cast<int>(c);
      if (t && p) ++tp[c];
      if (!t && p) ++fp[c];
      if (t && !p) ++fn[c];
    }
  }
  long stp = 0, sfp = 0, sfn = 0;
  double macro = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    stp += tp[c];
    sfp += fp[c];
    sfn += fn[c];
    if (!counted[c]) continue;
    const long denom = 2 * tp[c] + fp[c] + fn[c];
    macro += denom == 0 ? 0.0 : 2.0 * tp[c] / denom;
    ++n;
  }
  netvec::F1Scores s;
  const long denom = 2 * stp + sfp + sfn;
  s.micro = denom == 0 ? 0.0 : 2.0 * stp / denom;
  s.macro = n == 0 ? 0.0 : macro / n;
  return s;
}

struct ConditionalCheck {
  double max_tv = 0.0;
  double max_sum_error = 0.0;  // |sum - 1| of the exact distributions
  std::size_t pairs = 0;
  std::size_t steps = 0;
};

// Runs one long second-order walk from `start` until every arc (prev, cur)
// has been followed by `samples` observed steps, and compares the empirical
// next-step frequencies of the first `samples` observations with the exact
// distribution. Every arc of a connected non-bipartite graph is visited.
inline ConditionalCheck check_second_order_conditionals(const Graph& g, NodeId start, double p, double q,
                                                        double alpha, std::size_t samples, std::uint64_t seed) {
  netvec::WalkConfig cfg;
  cfg.order = netvec::WalkOrder::second;
  cfg.p = p;
  cfg.q = q;
  cfg.alpha = alpha;
  std::map<std::pair<NodeId, NodeId>, std::map<NodeId, std::size_t>> counts;
  std::map<std::pair<NodeId, NodeId>, std::size_t> seen;
  std::size_t arcs = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) arcs += g.degree(v);
  std::size_t complete = 0;
  netvec::Rng rng(seed);
  ConditionalCheck out;
  std::size_t length = 1 << 20;
  std::vector<NodeId> tail;  // last two nodes of the previous chunk
  while (complete < arcs) {
    // Consecutive chunks do not share second-order state; each restarts at
    // the previous chunk's end, and its first step is not counted.
    cfg.walk_length = length;
    auto w = netvec::generate_walk(g, tail.empty() ? start : tail.back(), cfg, nullptr, rng);
    for (std::size_t t = 2; t < w.size(); ++t) {
      const std::pair<NodeId, NodeId> key{w[t - 2], w[t - 1]};
      std::size_t& n = seen[key];
      if (n == samples) continue;
      ++counts[key][w[t]];
      if (++n == samples) ++complete;
    }
    out.steps += w.size();
    tail.assign(w.end() - 1, w.end());
  }
  for (const auto& [key, next] : counts) {
    const auto exact = netvec::transition_distribution_second_order(g, key.first, key.second, p, q, alpha);
    const auto nb = g.neighbors(key.second);
    double sum = 0.0, tv = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      sum += exact[i];
      auto it = next.find(nb[i].id);
      const double freq = it == next.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(samples);
      tv += std::abs(freq - exact[i]);
    }
    out.max_tv = std::max(out.max_tv, tv / 2.0);
    out.max_sum_error = std::max(out.max_sum_error, std::abs(sum - 1.0));
  }
  out.pairs = counts.size();
  return out;
}

inline netvec::WalkCorpus make_corpus(const std::vector<std::vector<NodeId>>& walks) {
  netvec::WalkCorpus c;
  for (const auto& w : walks) c.add(w);
  return c;
}

}  // namespace testsupport

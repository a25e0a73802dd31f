#include "netvec/walk.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "detail/text.hpp"
#include "netvec/error.hpp"
#include "netvec/parallel.hpp"

namespace netvec {

void WalkConfig::validate() const {
  if (!(p > 0.0) || !(q > 0.0) || !(alpha > 0.0)) throw Error("p, q and alpha must be positive");
  if (!(jump_rate >= 0.0 && jump_rate <= 1.0)) throw Error("jump rate must lie in [0, 1]");
  if (walk_length < 2) throw Error("walk length must be at least 2");
  if (num_walks < 1) throw Error("number of walks must be at least 1");
  if (degree_bins < 1) throw Error("degree bins must be at least 1");
  if (jump_rate > 0.0 && jump_top_k < 1) throw Error("jump top-k must be at least 1");
}

std::size_t degree_bin(std::size_t degree, std::size_t max_degree, std::size_t num_bins) {
  if (degree == 0 || max_degree <= 1) return 0;
  const std::size_t bin = (degree - 1) * num_bins / (max_degree - 1);
  return std::min(bin, num_bins - 1);
}

namespace {

void fill_profile(const Graph& g, NodeId v, std::span<double> out) {
  const std::size_t bins = out.size();
  const std::size_t max_degree = g.max_degree();
  auto nbrs = g.neighbors(v);
  const double share = 1.0 / static_cast<double>(nbrs.size() + 1);
  std::fill(out.begin(), out.end(), 0.0);
  out[degree_bin(nbrs.size(), max_degree, bins)] += share;
  for (const Neighbor& nb : nbrs) out[degree_bin(g.degree(nb.id), max_degree, bins)] += share;
}

inline double jsd_term(double a, double b) {
  const double m = 0.5 * (a + b);
  double t = 0.0;
  if (a > 0.0) t += a * std::log2(a / m);
  if (b > 0.0) t += b * std::log2(b / m);
  return 0.5 * t;
}

inline double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

struct SparseEntry {
  std::size_t bin;
  double value;
};

// Same terms in the same bin order as the dense jsd(), so results agree bit for bit.
double sparse_jsd(std::span<const SparseEntry> a, std::span<const SparseEntry> b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].bin < b[j].bin)) {
      sum += jsd_term(a[i++].value, 0.0);
    } else if (i == a.size() || b[j].bin < a[i].bin) {
      sum += jsd_term(0.0, b[j++].value);
    } else {
      sum += jsd_term(a[i++].value, b[j++].value);
    }
  }
  return clamp_unit(sum);
}

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw Error(std::string(name) + " has a negative or NaN entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw Error(std::string(name) + " is not normalized");
}

// Unnormalized second-order masses aligned with g.neighbors(cur).
void fill_second_order_masses(const Graph& g, NodeId prev, NodeId cur, double p, double q, double alpha,
                              std::vector<double>& masses) {
  auto nbrs = g.neighbors(cur);
  masses.resize(nbrs.size());
  if (p == q && q == alpha) {
    for (std::size_t i = 0; i < nbrs.size(); ++i) masses[i] = nbrs[i].weight;
    return;
  }
  auto prev_nbrs = g.neighbors(prev);
  std::size_t j = 0;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const NodeId x = nbrs[i].id;
    while (j < prev_nbrs.size() && prev_nbrs[j].id < x) ++j;
    double factor = alpha;
    if (x == prev) {
      factor = p;
    } else if (j < prev_nbrs.size() && prev_nbrs[j].id == x) {
      factor = q;
    }
    masses[i] = nbrs[i].weight * factor;
  }
}

std::size_t roulette(std::span<const double> masses, Rng& rng) {
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  double r = uniform01(rng) * total;
  for (std::size_t i = 0; i + 1 < masses.size(); ++i) {
    if (r < masses[i]) return i;
    r -= masses[i];
  }
  return masses.size() - 1;
}

}  // namespace

std::vector<double> structural_profile(const Graph& g, NodeId v, std::size_t num_bins) {
  if (num_bins == 0) throw Error("degree bins must be at least 1");
  std::vector<double> out(num_bins);
  fill_profile(g, v, out);
  return out;
}

StructuralProfiles structural_profiles(const Graph& g, std::size_t num_bins, std::size_t threads) {
  if (num_bins == 0) throw Error("degree bins must be at least 1");
  StructuralProfiles profiles(g.num_nodes(), num_bins);
  parallel_blocks(g.num_nodes(), threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t v = begin; v < end; ++v) fill_profile(g, static_cast<NodeId>(v), profiles[v]);
  });
  return profiles;
}

double jsd(std::span<const double> pa, std::span<const double> pb) {
  if (pa.size() != pb.size()) throw Error("jsd: vectors differ in length");
  check_distribution(pa, "jsd: first vector");
  check_distribution(pb, "jsd: second vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i] > 0.0 || pb[i] > 0.0) sum += jsd_term(pa[i], pb[i]);
  }
  return clamp_unit(sum);
}

JumpTable::JumpTable(std::vector<std::vector<JumpCandidate>> candidates)
    : candidates_(std::move(candidates)), cumulative_(candidates_.size()) {
  for (std::size_t v = 0; v < candidates_.size(); ++v) {
    double running = 0.0;
    for (const JumpCandidate& c : candidates_[v]) {
      if (!(c.weight > 0.0)) throw Error("jump weights must be positive");
      if (c.node == v) throw Error("a node cannot be its own jump candidate");
      running += c.weight;
      cumulative_[v].push_back(running);
    }
  }
}

NodeId JumpTable::draw(NodeId v, Rng& rng) const {
  const auto& cum = cumulative_.at(v);
  if (cum.empty()) throw Error("node " + std::to_string(v) + " has no jump candidates");
  const double r = uniform01(rng) * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), r);
  const std::size_t idx = std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
  return candidates_[v][idx].node;
}

JumpTable build_jump_table(const Graph& g, const StructuralProfiles& profiles, std::size_t top_k,
                           std::size_t threads) {
  const std::size_t n = g.num_nodes();
  if (profiles.num_nodes() != n) throw Error("structural profiles do not match the graph");

  std::vector<std::vector<SparseEntry>> support(n);
  for (NodeId v = 0; v < n; ++v) {
    auto row = profiles[v];
    for (std::size_t b = 0; b < row.size(); ++b) {
      if (row[b] > 0.0) support[v].push_back({b, row[b]});
    }
  }

  std::vector<std::vector<JumpCandidate>> table(n);
  const std::size_t k = std::min(top_k, n > 0 ? n - 1 : 0);
  parallel_blocks(n, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<std::pair<double, NodeId>> scored;
    for (std::size_t v = begin; v < end; ++v) {
      scored.clear();
      for (NodeId u = 0; u < n; ++u) {
        if (u != v) scored.emplace_back(sparse_jsd(support[v], support[u]), u);
      }
      std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
      auto& out = table[v];
      for (std::size_t i = 0; i < k; ++i) out.push_back({scored[i].second, std::exp(-scored[i].first)});
      std::stable_sort(out.begin(), out.end(), [](const JumpCandidate& a, const JumpCandidate& b) {
        return a.weight != b.weight ? a.weight > b.weight : a.node < b.node;
      });
    }
  });
  return JumpTable(std::move(table));
}

std::vector<double> transition_distribution_second_order(const Graph& g, NodeId prev, NodeId cur,
                                                         double p, double q, double alpha) {
  if (!(p > 0.0) || !(q > 0.0) || !(alpha > 0.0)) throw Error("p, q and alpha must be positive");
  if (!g.has_edge(prev, cur)) {
    throw Error("node " + std::to_string(prev) + " is not adjacent to " + std::to_string(cur));
  }
  std::vector<double> masses;
  fill_second_order_masses(g, prev, cur, p, q, alpha, masses);
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  for (double& m : masses) m /= total;
  return masses;
}

void WalkCorpus::add(std::span<const NodeId> walk) {
  tokens_.insert(tokens_.end(), walk.begin(), walk.end());
  offsets_.push_back(tokens_.size());
}

namespace {

void walk_into(const Graph& g, NodeId start, const WalkConfig& cfg, const JumpTable* jumps, Rng& rng,
               std::vector<NodeId>& walk, std::vector<double>& masses) {
  if (g.degree(start) == 0) throw Error("walk start " + std::to_string(start) + " has degree 0");
  if (cfg.jump_rate > 0.0 && jumps == nullptr) throw Error("jumping requires a jump table");
  walk.clear();
  walk.push_back(start);
  bool has_prev = false;
  NodeId prev = 0;
  while (walk.size() < cfg.walk_length) {
    const NodeId cur = walk.back();
    if (cfg.jump_rate > 0.0 && uniform01(rng) < cfg.jump_rate && !jumps->candidates(cur).empty()) {
      walk.push_back(jumps->draw(cur, rng));
      has_prev = false;
      continue;
    }
    auto nbrs = g.neighbors(cur);
    if (nbrs.empty()) break;
    if (cfg.order == WalkOrder::second && has_prev) {
      fill_second_order_masses(g, prev, cur, cfg.p, cfg.q, cfg.alpha, masses);
    } else {
      masses.resize(nbrs.size());
      for (std::size_t i = 0; i < nbrs.size(); ++i) masses[i] = nbrs[i].weight;
    }
    prev = cur;
    has_prev = true;
    walk.push_back(nbrs[roulette(masses, rng)].id);
  }
}

}  // namespace

std::vector<NodeId> generate_walk(const Graph& g, NodeId start, const WalkConfig& cfg, const JumpTable* jumps,
                                  Rng& rng) {
  cfg.validate();
  std::vector<NodeId> walk;
  std::vector<double> masses;
  walk_into(g, start, cfg, jumps, rng, walk, masses);
  return walk;
}

WalkCorpus generate_corpus(const Graph& g, const WalkConfig& cfg) {
  if (cfg.jump_rate > 0.0) {
    const JumpTable jumps =
        build_jump_table(g, structural_profiles(g, cfg.degree_bins, cfg.threads), cfg.jump_top_k, cfg.threads);
    return generate_corpus(g, cfg, &jumps);
  }
  return generate_corpus(g, cfg, nullptr);
}

WalkCorpus generate_corpus(const Graph& g, const WalkConfig& cfg, const JumpTable* jumps) {
  cfg.validate();
  std::vector<NodeId> starts;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.degree(v) > 0) starts.push_back(v);
  }
  if (starts.empty()) throw Error("graph has no node with degree >= 1");

  const std::size_t per_pass = starts.size();
  std::vector<NodeId> schedule;
  schedule.reserve(cfg.num_walks * per_pass);
  for (std::size_t pass = 0; pass < cfg.num_walks; ++pass) {
    std::vector<NodeId> order = starts;
    Rng rng(derive_seed(cfg.seed, {0x73687566ULL, pass}));
    std::shuffle(order.begin(), order.end(), rng);
    schedule.insert(schedule.end(), order.begin(), order.end());
  }

  std::vector<std::vector<NodeId>> walks(schedule.size());
  parallel_blocks(schedule.size(), cfg.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<double> masses;
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t pass = i / per_pass;
      Rng rng(derive_seed(cfg.seed, {pass, schedule[i]}));
      walk_into(g, schedule[i], cfg, jumps, rng, walks[i], masses);
    }
  });

  WalkCorpus corpus;
  for (const auto& w : walks) corpus.add(w);
  return corpus;
}

void write_corpus(std::ostream& out, const WalkCorpus& corpus) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto walk = corpus[i];
    for (std::size_t j = 0; j < walk.size(); ++j) {
      if (j) out << ' ';
      out << walk[j];
    }
    out << '\n';
  }
}

WalkCorpus read_corpus(std::istream& in) {
  WalkCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  std::vector<NodeId> walk;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    walk.clear();
    for (auto field : detail::split_fields(line)) {
      auto id = detail::parse_number<NodeId>(field);
      if (!id) throw ParseError(line_no, "invalid node id '" + std::string(field) + "'");
      walk.push_back(*id);
    }
    corpus.add(walk);
  }
  return corpus;
}

}  // namespace netvec

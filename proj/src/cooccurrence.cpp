#include "netvec/cooccurrence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "detail/text.hpp"
#include "netvec/error.hpp"
#include "netvec/parallel.hpp"

namespace netvec {

double CooccurrenceTable::at(NodeId m, NodeId k) const {
  if (m >= num_nodes()) return 0.0;
  auto cols = row_indices(m);
  auto it = std::lower_bound(cols.begin(), cols.end(), k);
  if (it == cols.end() || *it != k) return 0.0;
  return row_values(m)[static_cast<std::size_t>(it - cols.begin())];
}

void CooccurrenceTable::finalize() {
  const std::size_t n = offsets_.size() - 1;
  row_totals_.assign(n, 0.0);
  total_mass_ = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    double sum = 0.0;
    for (std::size_t i = offsets_[m]; i < offsets_[m + 1]; ++i) sum += vals_[i];
    row_totals_[m] = sum;
    total_mass_ += sum;
  }
}

std::vector<Triplet> CooccurrenceTable::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (NodeId m = 0; m < num_nodes(); ++m) {
    auto cols = row_indices(m);
    auto vals = row_values(m);
    for (std::size_t i = 0; i < cols.size(); ++i) out.push_back({m, cols[i], vals[i]});
  }
  return out;
}

CooccurrenceTable CooccurrenceTable::from_triplets(std::size_t num_nodes, std::vector<Triplet> triplets) {
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.m != b.m ? a.m < b.m : a.k < b.k;
  });
  CooccurrenceTable t;
  t.offsets_.assign(num_nodes + 1, 0);
  for (std::size_t i = 0; i < triplets.size();) {
    const Triplet& first = triplets[i];
    if (first.m >= num_nodes || first.k >= num_nodes) throw Error("triplet references an unknown node");
    double sum = 0.0;
    std::size_t j = i;
    for (; j < triplets.size() && triplets[j].m == first.m && triplets[j].k == first.k; ++j) {
      if (!(triplets[j].value > 0.0) || !std::isfinite(triplets[j].value)) {
        throw Error("co-occurrence values must be positive and finite");
      }
      sum += triplets[j].value;
    }
    t.cols_.push_back(first.k);
    t.vals_.push_back(sum);
    ++t.offsets_[first.m + 1];
    i = j;
  }
  std::partial_sum(t.offsets_.begin(), t.offsets_.end(), t.offsets_.begin());
  t.finalize();
  for (NodeId m = 0; m < num_nodes; ++m) {
    auto cols = t.row_indices(m);
    auto vals = t.row_values(m);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (t.at(cols[i], m) != vals[i]) throw Error("co-occurrence table is not symmetric");
    }
  }
  return t;
}

namespace {

struct Occurrence {
  std::uint32_t walk;
  std::uint32_t pos;
};

std::uint64_t lcm_up_to(std::size_t window) {
  std::uint64_t l = 1;
  for (std::uint64_t d = 2; d <= window; ++d) l = std::lcm(l, d);
  return l;
}

}  // namespace

CooccurrenceTable accumulate_cooccurrence(const WalkCorpus& corpus, std::size_t num_nodes, std::size_t window,
                                          std::size_t threads) {
  if (window < 1 || window > kMaxWindow) {
    throw Error("window must lie in [1, " + std::to_string(kMaxWindow) + "]");
  }
  if (corpus.empty()) throw Error("walk corpus is empty");

  // Where each node occurs, in corpus order.
  std::vector<std::size_t> occ_offsets(num_nodes + 1, 0);
  for (std::size_t w = 0; w < corpus.size(); ++w) {
    for (NodeId v : corpus[w]) {
      if (v >= num_nodes) throw Error("corpus references node " + std::to_string(v) + " outside the graph");
      ++occ_offsets[v + 1];
    }
  }
  std::partial_sum(occ_offsets.begin(), occ_offsets.end(), occ_offsets.begin());
  std::vector<Occurrence> occurrences(occ_offsets.back());
  {
    std::vector<std::size_t> cursor(occ_offsets.begin(), occ_offsets.end() - 1);
    for (std::size_t w = 0; w < corpus.size(); ++w) {
      auto walk = corpus[w];
      for (std::size_t i = 0; i < walk.size(); ++i) {
        occurrences[cursor[walk[i]]++] = {static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(i)};
      }
    }
  }

  const std::uint64_t scale = lcm_up_to(window);
  std::vector<std::uint64_t> unit(window + 1, 0);
  for (std::size_t d = 1; d <= window; ++d) unit[d] = scale / d;

  // Row m collects every window partner of every occurrence of m, which
  // covers both directions of each position pair.
  std::vector<std::vector<std::pair<NodeId, std::uint64_t>>> rows(num_nodes);
  parallel_blocks(num_nodes, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<std::uint64_t> counts(num_nodes, 0);
    std::vector<NodeId> touched;
    for (std::size_t m = begin; m < end; ++m) {
      touched.clear();
      for (std::size_t o = occ_offsets[m]; o < occ_offsets[m + 1]; ++o) {
        auto walk = corpus[occurrences[o].walk];
        const std::size_t pos = occurrences[o].pos;
        const std::size_t lo = pos >= window ? pos - window : 0;
        const std::size_t hi = std::min(walk.size() - 1, pos + window);
        for (std::size_t j = lo; j <= hi; ++j) {
          const NodeId x = walk[j];
          if (x == m) continue;
          if (counts[x] == 0) touched.push_back(x);
          counts[x] += unit[j > pos ? j - pos : pos - j];
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = rows[m];
      row.reserve(touched.size());
      for (NodeId x : touched) {
        row.emplace_back(x, counts[x]);
        counts[x] = 0;
      }
    }
  });

  CooccurrenceTable t;
  t.offsets_.assign(num_nodes + 1, 0);
  for (std::size_t m = 0; m < num_nodes; ++m) t.offsets_[m + 1] = t.offsets_[m] + rows[m].size();
  t.cols_.reserve(t.offsets_.back());
  t.vals_.reserve(t.offsets_.back());
  const double denom = static_cast<double>(scale);
  for (auto& row : rows) {
    for (auto [k, count] : row) {
      t.cols_.push_back(k);
      t.vals_.push_back(static_cast<double>(count) / denom);
    }
    std::vector<std::pair<NodeId, std::uint64_t>>().swap(row);
  }
  t.finalize();
  return t;
}

std::vector<TrainingEntry> cooccurrence_targets(const CooccurrenceTable& t, TargetMode mode) {
  if (t.empty()) throw Error("co-occurrence table is empty");
  std::vector<TrainingEntry> entries;
  entries.reserve(t.nnz());
  for (NodeId m = 0; m < t.num_nodes(); ++m) {
    auto cols = t.row_indices(m);
    auto vals = t.row_values(m);
    const double log_total = std::log(t.row_total(m));
    for (std::size_t i = 0; i < cols.size(); ++i) {
      double target = std::log(vals[i]);
      if (mode == TargetMode::log_prob) target -= log_total;
      entries.push_back({m, cols[i], target, std::log1p(vals[i])});
    }
  }
  return entries;
}

std::vector<TrainingEntry> pmi_targets(const CooccurrenceTable& t, double n_negative, bool clip_negative) {
  if (t.empty()) throw Error("co-occurrence table is empty");
  if (!(n_negative >= 1.0)) throw Error("PMI shift n must be at least 1");
  std::vector<TrainingEntry> entries;
  entries.reserve(t.nnz());
  const double log_mass = std::log(t.total_mass());
  const double shift = std::log(n_negative);
  for (NodeId m = 0; m < t.num_nodes(); ++m) {
    auto cols = t.row_indices(m);
    auto vals = t.row_values(m);
    const double log_cm = std::log(t.row_total(m));
    for (std::size_t i = 0; i < cols.size(); ++i) {
      double s = std::log(vals[i]) + log_mass - log_cm - std::log(t.row_total(cols[i])) - shift;
      if (clip_negative) s = std::max(s, 0.0);
      entries.push_back({m, cols[i], s, std::log1p(vals[i])});
    }
  }
  return entries;
}

void write_table(std::ostream& out, const CooccurrenceTable& t) {
  for (NodeId m = 0; m < t.num_nodes(); ++m) {
    auto cols = t.row_indices(m);
    auto vals = t.row_values(m);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << m << '\t' << cols[i] << '\t' << detail::format_double(vals[i]) << '\n';
    }
  }
}

}  // namespace netvec

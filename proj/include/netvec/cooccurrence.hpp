#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "netvec/graph.hpp"
#include "netvec/walk.hpp"

namespace netvec {

// Largest supported co-occurrence window. Counts are accumulated exactly in
// integer units of 1/lcm(1..window), which must stay well inside 64 bits.
inline constexpr std::size_t kMaxWindow = 24;

struct Triplet {
  NodeId m;
  NodeId k;
  double value;
};

// Symmetric sparse table of distance-weighted co-occurrence counts C_mk,
// stored as sorted compressed rows.
class CooccurrenceTable {
 public:
  CooccurrenceTable() = default;

  // Sums duplicate cells; throws if a value is not positive or the result
  // is not symmetric.
  static CooccurrenceTable from_triplets(std::size_t num_nodes, std::vector<Triplet> triplets);

  std::size_t num_nodes() const noexcept { return row_totals_.size(); }
  std::size_t nnz() const noexcept { return cols_.size(); }
  bool empty() const noexcept { return cols_.empty(); }

  std::span<const NodeId> row_indices(NodeId m) const {
    return {cols_.data() + offsets_[m], offsets_[m + 1] - offsets_[m]};
  }
  std::span<const double> row_values(NodeId m) const {
    return {vals_.data() + offsets_[m], offsets_[m + 1] - offsets_[m]};
  }
  // C_mk, or 0 when the cell is not stored.
  double at(NodeId m, NodeId k) const;
  // C_m, the sum of row m in stored order.
  double row_total(NodeId m) const { return row_totals_.at(m); }
  // |D|, the sum of all row totals.
  double total_mass() const noexcept { return total_mass_; }

  std::vector<Triplet> triplets() const;

 private:
  friend CooccurrenceTable accumulate_cooccurrence(const WalkCorpus&, std::size_t, std::size_t, std::size_t);
  void finalize();

  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> cols_;
  std::vector<double> vals_;
  std::vector<double> row_totals_;
  double total_mass_ = 0.0;
};

// For every walk position pair (i, j) with 1 <= j - i <= window and
// w[i] != w[j], adds 1 / (j - i) to both C[w[i]][w[j]] and C[w[j]][w[i]].
// The result is exact up to one final rounding per cell and does not depend
// on the thread count.
CooccurrenceTable accumulate_cooccurrence(const WalkCorpus& corpus, std::size_t num_nodes, std::size_t window,
                                          std::size_t threads = 1);

struct TrainingEntry {
  NodeId m;
  NodeId k;
  double target;
  double penalty;
};

enum class TargetMode { log_count, log_prob };

// One entry per stored cell: target log C_mk (log_count) or log(C_mk / C_m)
// (log_prob), penalty log(1 + C_mk).
std::vector<TrainingEntry> cooccurrence_targets(const CooccurrenceTable& t, TargetMode mode);

// Shifted PMI: log(C_mk |D| / (C_m C_k)) - log n_negative, penalty log(1 + C_mk).
// Negative values are kept unless clip_negative is set, in which case they
// are clamped to 0.
std::vector<TrainingEntry> pmi_targets(const CooccurrenceTable& t, double n_negative, bool clip_negative = false);

// "m<TAB>k<TAB>C_mk" lines in row order.
void write_table(std::ostream& out, const CooccurrenceTable& t);

}  // namespace netvec

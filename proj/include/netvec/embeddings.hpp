#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "netvec/graph.hpp"
#include "netvec/trainer.hpp"

namespace netvec {

enum class ExportMode { center, center_plus_context };

// Dense node vectors keyed by internal id, with the labels they are exported under.
class Embeddings {
 public:
  Embeddings() = default;
  Embeddings(NodeIdMap ids, std::size_t dim, std::vector<double> values);

  std::size_t num_nodes() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const NodeIdMap& ids() const noexcept { return ids_; }

  std::span<const double> operator[](NodeId v) const;
  std::span<double> operator[](NodeId v);

 private:
  NodeIdMap ids_;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

// Center vectors, or w + w~ per node; `normalize` scales every non-zero row
// to unit Euclidean norm.
Embeddings extract_embeddings(const EmbeddingModel& model, const NodeIdMap& ids, ExportMode mode, bool normalize);

// Header "num_nodes dim", then "label v_1 ... v_dim" per node in id order.
void write_embeddings(std::ostream& out, const Embeddings& emb);
Embeddings read_embeddings(std::istream& in);
Embeddings read_embeddings_file(const std::string& path);

void export_embeddings(const EmbeddingModel& model, const NodeIdMap& ids, ExportMode mode, bool normalize,
                       std::ostream& out);

}  // namespace netvec

#include "netvec/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "detail/text.hpp"
#include "netvec/error.hpp"

namespace netvec {

Embeddings::Embeddings(NodeIdMap ids, std::size_t dim, std::vector<double> values)
    : ids_(std::move(ids)), dim_(dim), values_(std::move(values)) {
  if (values_.size() != ids_.size() * dim_) throw Error("embedding values do not match num_nodes * dim");
}

std::span<const double> Embeddings::operator[](NodeId v) const {
  if (v >= num_nodes()) throw Error("no embedding for node id " + std::to_string(v));
  return {values_.data() + v * dim_, dim_};
}

std::span<double> Embeddings::operator[](NodeId v) {
  if (v >= num_nodes()) throw Error("no embedding for node id " + std::to_string(v));
  return {values_.data() + v * dim_, dim_};
}

Embeddings extract_embeddings(const EmbeddingModel& model, const NodeIdMap& ids, ExportMode mode, bool normalize) {
  if (ids.size() != model.num_nodes) throw Error("node map and model disagree on the number of nodes");
  std::vector<double> values(model.center);
  if (mode == ExportMode::center_plus_context) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += model.context[i];
  }
  if (normalize) {
    for (std::size_t v = 0; v < model.num_nodes; ++v) {
      double* row = values.data() + v * model.dim;
      double norm = 0.0;
      for (std::size_t i = 0; i < model.dim; ++i) norm += row[i] * row[i];
      norm = std::sqrt(norm);
      if (norm > 0.0) {
        for (std::size_t i = 0; i < model.dim; ++i) row[i] /= norm;
      }
    }
  }
  return Embeddings(ids, model.dim, std::move(values));
}

void write_embeddings(std::ostream& out, const Embeddings& emb) {
  out << emb.num_nodes() << ' ' << emb.dim() << '\n';
  std::string line;
  for (NodeId v = 0; v < emb.num_nodes(); ++v) {
    line = emb.ids().label(v);
    for (double x : emb[v]) {
      line += ' ';
      line += detail::format_double(x);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error("failed to write embeddings");
}

Embeddings read_embeddings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing 'num_nodes dim' header");
  auto header = detail::split_fields(line);
  std::optional<std::size_t> n, dim;
  if (header.size() == 2) {
    n = detail::parse_number<std::size_t>(header[0]);
    dim = detail::parse_number<std::size_t>(header[1]);
  }
  if (!n || !dim) throw ParseError(1, "expected 'num_nodes dim' header");

  NodeIdMap ids;
  std::vector<double> values;
  values.reserve(*n * *dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != *dim + 1) {
      throw ParseError(line_no, "expected a label and " + std::to_string(*dim) + " values");
    }
    if (ids.find(fields[0])) throw ParseError(line_no, "duplicate label '" + std::string(fields[0]) + "'");
    ids.intern(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto x = detail::parse_number<double>(fields[i]);
      if (!x) throw ParseError(line_no, "invalid value '" + std::string(fields[i]) + "'");
      values.push_back(*x);
    }
  }
  if (ids.size() != *n) {
    throw Error("embedding header announces " + std::to_string(*n) + " nodes but " + std::to_string(ids.size()) +
                " were read");
  }
  return Embeddings(std::move(ids), *dim, std::move(values));
}

Embeddings read_embeddings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file '" + path + "'");
  return read_embeddings(in);
}

void export_embeddings(const EmbeddingModel& model, const NodeIdMap& ids, ExportMode mode, bool normalize,
                       std::ostream& out) {
  write_embeddings(out, extract_embeddings(model, ids, mode, normalize));
}

}  // namespace netvec

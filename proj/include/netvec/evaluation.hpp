#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "netvec/embeddings.hpp"
#include "netvec/graph.hpp"

namespace netvec {

// Class ids per node id; an empty list marks an unlabeled node.
struct LabeledNodes {
  std::size_t num_classes = 0;
  std::vector<std::vector<int>> labels;

  std::size_t num_labeled() const;
};

// "node_label<TAB>class_id" lines, repeated for multilabel nodes. Every node
// label must be present in `ids`.
LabeledNodes read_labels(std::istream& in, const NodeIdMap& ids);

std::vector<double> hadamard_feature(const Embeddings& emb, NodeId u, NodeId v);

// `count` distinct unordered non-adjacent pairs (u < v), drawn uniformly.
std::vector<Edge> sample_negatives(const Graph& g, std::size_t count, std::uint64_t seed);

struct LogRegConfig {
  double l2 = 1.0;  // penalty on the weights; the intercept is not penalized
  std::size_t max_iterations = 100;
  double tolerance = 1e-8;  // on the max-norm of the gradient
};

// Binary logistic regression decision function w.x + b.
struct LinearClassifier {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  bool converged = false;
  std::size_t iterations = 0;

  double decision(const Eigen::Ref<const Eigen::VectorXd>& x) const { return weights.dot(x) + intercept; }
  double probability(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

// Minimizes sum_i logloss_i + l2/2 |w|^2 with damped Newton steps. Rows of
// `features` are examples; `labels` are 0/1 and must contain both values.
LinearClassifier train_logreg(const Eigen::MatrixXd& features, std::span<const int> labels,
                              const LogRegConfig& cfg = {});

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

// Micro F1 pools all classes; macro F1 averages per-class F1 over the classes
// with counted[c] set (a class with no true or predicted member scores 0).
F1Scores f1_scores(const std::vector<std::vector<int>>& truth, const std::vector<std::vector<int>>& predicted,
                   std::size_t num_classes, const std::vector<bool>& counted);

struct ClassifyOptions {
  double train_ratio = 0.5;
  bool multilabel = false;
  std::uint64_t seed = 1;
  LogRegConfig logreg;
};

struct ClassificationResult {
  F1Scores scores;
  std::vector<int> skipped_classes;  // absent from the training split
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

// Seeded split stratified by each node's smallest label, one-vs-rest logistic
// regression, argmax prediction (multi-class) or top-|truth| prediction
// (multilabel).
ClassificationResult classify_nodes(const Embeddings& emb, const LabeledNodes& labels, const ClassifyOptions& options);

using Embedder = std::function<Embeddings(const Graph& residual)>;

struct LinkPredictionOptions {
  double removal_fraction = 0.3;
  std::uint64_t seed = 1;
  LogRegConfig logreg;
};

struct LinkPredictionResult {
  double accuracy = 0.0;
  std::size_t requested = 0;
  std::size_t removed = 0;
  std::size_t train_examples = 0;
  std::size_t test_examples = 0;
};

// Removes edges while keeping the graph connected, embeds the residual,
// labels removed edges positive and twice as many sampled non-edges of the
// original graph negative, and reports logistic-regression accuracy on
// Hadamard features over a seeded 50/50 split of those examples.
LinkPredictionResult link_prediction(const Graph& g, const LinkPredictionOptions& options, const Embedder& embed);

struct Projection {
  std::vector<std::array<double, 2>> coords;
  std::array<double, 2> variance{};  // variance along each component
  bool degenerate = false;           // all input vectors identical
};

// Mean-centered projection onto the top two principal directions; each
// direction's first non-zero loading is positive.
Projection project_2d(const Embeddings& emb);

// Lloyd's k-means with deterministic farthest-point initialization.
std::vector<int> kmeans(std::span<const std::array<double, 2>> points, std::size_t k, std::size_t max_iterations = 100);

// Fraction of items whose cluster matches the truth under the best
// relabeling of clusters (k <= 8).
double cluster_agreement(std::span<const int> clusters, std::span<const int> truth);

}  // namespace netvec

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "netvec/cooccurrence.hpp"

namespace netvec {

// Center vectors w, context vectors w~, their biases, and one AdaGrad
// accumulator per parameter. Vectors are stored row-major, one row per node.
struct EmbeddingModel {
  std::size_t num_nodes = 0;
  std::size_t dim = 0;
  bool bias_enabled = true;

  std::vector<double> center;
  std::vector<double> context;
  std::vector<double> center_bias;
  std::vector<double> context_bias;

  std::vector<double> center_acc;
  std::vector<double> context_acc;
  std::vector<double> center_bias_acc;
  std::vector<double> context_bias_acc;

  std::span<double> center_row(NodeId m) { return {center.data() + m * dim, dim}; }
  std::span<const double> center_row(NodeId m) const { return {center.data() + m * dim, dim}; }
  std::span<double> context_row(NodeId k) { return {context.data() + k * dim, dim}; }
  std::span<const double> context_row(NodeId k) const { return {context.data() + k * dim, dim}; }

  // w_m . w~_k + b_m + b~_k (biases only when enabled).
  double score(NodeId m, NodeId k) const;

  friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 10;
  std::size_t threads = 10;
  std::uint64_t seed = 1;
  // Single worker with a fixed update order; bit-reproducible.
  bool deterministic = false;
  // Never run more workers than hardware threads; oversubscribed lock-free
  // updates only add contention.
  bool limit_to_hardware = true;

  void validate() const;
};

// Vector entries uniform in (-0.5/dim, 0.5/dim), biases 0, accumulators 1.
EmbeddingModel init_model(std::size_t num_nodes, std::size_t dim, bool bias_enabled, std::uint64_t seed);

// r = w_m . w~_k + b_m + b~_k - target.
double entry_residual(const EmbeddingModel& model, const TrainingEntry& e);

// Sum of penalty * residual^2.
double loss(const EmbeddingModel& model, std::span<const TrainingEntry> entries, std::size_t threads = 1);

struct EntryGradients {
  std::vector<double> center;   // p r w~_k
  std::vector<double> context;  // p r w_m
  double center_bias = 0.0;     // p r (0 when biases are disabled)
  double context_bias = 0.0;
};

// Gradient of one half of the entry's weighted squared error. Throws
// DivergenceError if the model values involved are not finite.
EntryGradients entry_gradients(const EmbeddingModel& model, const TrainingEntry& e);

// AdaGrad over seeded per-epoch shuffles of the entries: every coordinate is
// updated as theta -= lr * g / sqrt(acc), then acc += g^2. Returns the loss
// after each epoch. Throws DivergenceError when the loss stops being finite.
std::vector<double> train(EmbeddingModel& model, std::span<const TrainingEntry> entries, const TrainConfig& cfg);

}  // namespace netvec

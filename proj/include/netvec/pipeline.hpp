#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "netvec/cooccurrence.hpp"
#include "netvec/embeddings.hpp"
#include "netvec/graph.hpp"
#include "netvec/trainer.hpp"
#include "netvec/walk.hpp"

namespace netvec {

enum class IndicatorKind { cooccurrence, pmi };

struct PipelineConfig {
  WalkConfig walk;
  std::size_t window = 10;
  IndicatorKind indicator = IndicatorKind::cooccurrence;
  TargetMode target = TargetMode::log_count;
  double pmi_n = 1.0;
  bool pmi_clip = false;
  std::size_t dim = 128;
  TrainConfig train;
  ExportMode export_mode = ExportMode::center;
  bool normalize_export = false;
  std::size_t threads = 10;
  std::uint64_t seed = 1;
  int verbosity = 1;

  void validate() const;
  // Stage configs with the global seed and thread count applied.
  WalkConfig walk_config() const;
  TrainConfig train_config() const;
  // Biases are fitted only for log-count targets, where they absorb log C_m.
  bool bias_enabled() const noexcept {
    return indicator == IndicatorKind::cooccurrence && target == TargetMode::log_count;
  }
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  EmbeddingModel model;
  std::vector<double> loss_trace;
  std::vector<StageTiming> timings;
  std::size_t num_walks = 0;
  std::size_t num_entries = 0;
};

struct PipelineDumps {
  std::ostream* corpus = nullptr;
  std::ostream* table = nullptr;
};

// walk -> co-occurrence -> targets -> train. Nodes without edges end with
// all-zero parameters. Errors are rethrown as StageError naming the stage.
// Stage timings go to `log` when verbosity >= 1.
PipelineResult run_pipeline(const Graph& g, const PipelineConfig& cfg, std::ostream* log = nullptr,
                            const PipelineDumps& dumps = {});

// run_pipeline followed by extract_embeddings with the configured export options.
Embeddings embed_graph(const Graph& g, const NodeIdMap& ids, const PipelineConfig& cfg, std::ostream* log = nullptr);

}  // namespace netvec

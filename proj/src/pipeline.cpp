#include "netvec/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <type_traits>

#include "netvec/error.hpp"
#include "netvec/random.hpp"

namespace netvec {

void PipelineConfig::validate() const {
  walk_config().validate();
  train_config().validate();
  if (window < 1 || window > kMaxWindow) throw Error("window must lie in [1, " + std::to_string(kMaxWindow) + "]");
  if (dim < 1) throw Error("embedding dimension must be at least 1");
  if (indicator == IndicatorKind::pmi && !(pmi_n >= 1.0)) throw Error("PMI shift n must be at least 1");
  if (threads < 1) throw Error("threads must be at least 1");
}

WalkConfig PipelineConfig::walk_config() const {
  WalkConfig w = walk;
  w.seed = derive_seed(seed, {0x77616c6bULL});
  w.threads = threads;
  return w;
}

TrainConfig PipelineConfig::train_config() const {
  TrainConfig t = train;
  t.seed = derive_seed(seed, {0x747261696eULL});
  t.threads = threads;
  return t;
}

namespace {

template <class Fn>
auto timed_stage(const char* name, std::vector<StageTiming>& timings, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&] {
    timings.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      finish();
    } else {
      auto result = fn();
      finish();
      return result;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

PipelineResult run_pipeline(const Graph& g, const PipelineConfig& cfg, std::ostream* log, const PipelineDumps& dumps) {
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw StageError("config", e.what());
  }
  PipelineResult result;
  auto& timings = result.timings;

  const WalkCorpus corpus = timed_stage("walk", timings, [&] { return generate_corpus(g, cfg.walk_config()); });
  result.num_walks = corpus.size();
  if (dumps.corpus) write_corpus(*dumps.corpus, corpus);

  const CooccurrenceTable table = timed_stage(
      "cooccurrence", timings, [&] { return accumulate_cooccurrence(corpus, g.num_nodes(), cfg.window, cfg.threads); });
  if (dumps.table) write_table(*dumps.table, table);

  const std::vector<TrainingEntry> entries = timed_stage("targets", timings, [&] {
    return cfg.indicator == IndicatorKind::pmi ? pmi_targets(table, cfg.pmi_n, cfg.pmi_clip)
                                               : cooccurrence_targets(table, cfg.target);
  });
  result.num_entries = entries.size();

  timed_stage("train", timings, [&] {
    result.model = init_model(g.num_nodes(), cfg.dim, cfg.bias_enabled(), derive_seed(cfg.seed, {0x696e6974ULL}));
    result.loss_trace = train(result.model, entries, cfg.train_config());
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (g.degree(v) != 0) continue;
      std::ranges::fill(result.model.center_row(v), 0.0);
      std::ranges::fill(result.model.context_row(v), 0.0);
      result.model.center_bias[v] = 0.0;
      result.model.context_bias[v] = 0.0;
    }
  });

  if (log && cfg.verbosity >= 1) {
    *log << "walks=" << result.num_walks << " entries=" << result.num_entries << '\n';
    for (const StageTiming& t : timings) {
      *log << "stage " << std::left << std::setw(13) << t.stage << std::fixed << std::setprecision(3) << t.seconds
           << " s\n";
    }
    log->unsetf(std::ios_base::floatfield);
  }
  return result;
}

Embeddings embed_graph(const Graph& g, const NodeIdMap& ids, const PipelineConfig& cfg, std::ostream* log) {
  PipelineResult result = run_pipeline(g, cfg, log);
  return extract_embeddings(result.model, ids, cfg.export_mode, cfg.normalize_export);
}

}  // namespace netvec

#include "netvec/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "detail/text.hpp"
#include "netvec/error.hpp"
#include "netvec/evaluation.hpp"
#include "netvec/pipeline.hpp"

namespace netvec::cli {
namespace {

struct Options {
  PipelineConfig pipeline;
  std::string input;
  std::string labels;
  std::string output;
  std::string loss_trace;
  std::string dump_corpus;
  std::string dump_table;
  std::string id_map;
  bool directed = false;
  bool multilabel = false;
  double l2 = 1.0;
  std::vector<double> ratios{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> fractions{0.3, 0.5};
};

void add_options(CLI::App& app, Options& o) {
  PipelineConfig& p = o.pipeline;
  app.add_option("--input", o.input, "Edge list (walk, embed, eval-link) or embedding file (eval-class, project)");
  app.add_option("--labels", o.labels, "Label file: node_label<TAB>class_id");
  app.add_option("--output", o.output, "Output path");
  app.add_flag("--directed", o.directed, "Treat the edge list as directed");

  app.add_option("--walks", p.walk.num_walks, "Walks per node")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--walk-length", p.walk.walk_length, "Nodes per walk")->capture_default_str();
  app.add_option("--order", p.walk.order, "Markov order of the walk")
      ->transform(CLI::CheckedTransformer(std::map<std::string, WalkOrder>{{"first", WalkOrder::first},
                                                                           {"second", WalkOrder::second}}))
      ->capture_default_str();
  app.add_option("--p", p.walk.p, "Return weight")->capture_default_str();
  app.add_option("--q", p.walk.q, "Common-neighbor weight")->capture_default_str();
  app.add_option("--alpha", p.walk.alpha, "New-neighbor weight")->capture_default_str();
  app.add_option("--jump-rate", p.walk.jump_rate, "Per-step probability of a structural jump")
      ->capture_default_str();
  app.add_option("--jump-top-k", p.walk.jump_top_k, "Jump candidates per node")->capture_default_str();
  app.add_option("--degree-bins", p.walk.degree_bins, "Bins of the structural degree profile")
      ->capture_default_str();

  app.add_option("--window", p.window, "Co-occurrence window")->capture_default_str();
  app.add_option("--indicator", p.indicator, "Statistical indicator")
      ->transform(CLI::CheckedTransformer(std::map<std::string, IndicatorKind>{
          {"cooc", IndicatorKind::cooccurrence}, {"pmi", IndicatorKind::pmi}}))
      ->capture_default_str();
  app.add_option("--target", p.target, "Co-occurrence target transform")
      ->transform(CLI::CheckedTransformer(std::map<std::string, TargetMode>{
          {"log_count", TargetMode::log_count}, {"log_prob", TargetMode::log_prob}}))
      ->capture_default_str();
  app.add_option("--pmi-n", p.pmi_n, "PMI shift (number of negative samples)")->capture_default_str();
  app.add_flag("--pmi-clip", p.pmi_clip, "Clamp negative PMI targets to zero");

  app.add_option("--dim", p.dim, "Embedding dimension")->capture_default_str();
  app.add_option("--lr", p.train.learning_rate, "AdaGrad learning rate")->capture_default_str();
  app.add_option("--epochs", p.train.epochs, "Training epochs")->capture_default_str();
  app.add_option("--threads", p.threads, "Worker threads")->capture_default_str();
  app.add_option("--seed", p.seed, "Global random seed")->capture_default_str();
  app.add_flag("--deterministic", p.train.deterministic, "Single-worker, bit-reproducible training");
  app.add_flag("--normalize-export", p.normalize_export, "Scale exported vectors to unit norm");
  app.add_option("--export-mode", p.export_mode, "Exported vectors")
      ->transform(CLI::CheckedTransformer(std::map<std::string, ExportMode>{
          {"center", ExportMode::center}, {"center_plus_context", ExportMode::center_plus_context}}))
      ->capture_default_str();
  app.add_option("--verbose", p.verbosity, "0 = quiet, 1 = stage timings")->capture_default_str();

  app.add_option("--loss-trace", o.loss_trace, "Loss trace CSV (default: <output>.loss.csv)");
  app.add_option("--dump-corpus", o.dump_corpus, "Also write the walk corpus here");
  app.add_option("--dump-table", o.dump_table, "Also write the co-occurrence table here");
  app.add_option("--id-map", o.id_map, "Also write the label-to-id map here");

  app.add_option("--ratios", o.ratios, "Training ratios for eval-class")->delimiter(',')->capture_default_str();
  app.add_option("--fractions", o.fractions, "Edge removal fractions for eval-link")
      ->delimiter(',')
      ->capture_default_str();
  app.add_flag("--multilabel", o.multilabel, "Predict top-k labels per node");
  app.add_option("--l2", o.l2, "L2 strength of the logistic regression")->capture_default_str();
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw StageError("args", std::string(flag) + " is required");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

template <class Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  auto out = open_output(path);
  fn(out);
  if (!out) throw Error("failed writing '" + path + "'");
}

template <class Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

LoadedGraph load_graph(const Options& o) {
  require(o.input, "--input");
  return stage("load", [&] { return load_edge_list_file(o.input, {.directed = o.directed, .weighted = true}); });
}

void cmd_walk(const Options& o, std::ostream& out) {
  const LoadedGraph loaded = load_graph(o);
  stage("config", [&] { o.pipeline.walk_config().validate(); });
  const WalkCorpus corpus = stage("walk", [&] { return generate_corpus(loaded.graph, o.pipeline.walk_config()); });
  stage("write", [&] { with_output(o.output, out, [&](std::ostream& s) { write_corpus(s, corpus); }); });
}

void cmd_embed(const Options& o, std::ostream& err) {
  require(o.output, "--output");
  const LoadedGraph loaded = load_graph(o);
  if (loaded.skipped_self_loops && o.pipeline.verbosity >= 1) {
    err << "skipped " << loaded.skipped_self_loops << " self-loop line(s)\n";
  }
  std::ofstream corpus_out, table_out;
  PipelineDumps dumps;
  if (!o.dump_corpus.empty()) {
    corpus_out = open_output(o.dump_corpus);
    dumps.corpus = &corpus_out;
  }
  if (!o.dump_table.empty()) {
    table_out = open_output(o.dump_table);
    dumps.table = &table_out;
  }
  const PipelineResult result = run_pipeline(loaded.graph, o.pipeline, &err, dumps);

  stage("export", [&] {
    auto out = open_output(o.output);
    export_embeddings(result.model, loaded.ids, o.pipeline.export_mode, o.pipeline.normalize_export, out);
    auto trace = open_output(o.loss_trace.empty() ? o.output + ".loss.csv" : o.loss_trace);
    trace << "epoch,loss\n";
    for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
      trace << i + 1 << ',' << detail::format_double(result.loss_trace[i]) << '\n';
    }
    if (!o.id_map.empty()) {
      auto ids = open_output(o.id_map);
      loaded.ids.write_tsv(ids);
    }
  });
}

void write_row(std::ostream& out, const char* task, double param, const char* metric, double value,
               std::uint64_t seed) {
  out << task << ',' << detail::format_double(param) << ',' << metric << ',' << detail::format_double(value) << ','
      << seed << '\n';
}

void cmd_eval_class(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.input, "--input");
  require(o.labels, "--labels");
  const Embeddings emb = stage("load", [&] { return read_embeddings_file(o.input); });
  const LabeledNodes labels = stage("load", [&] {
    std::ifstream in(o.labels);
    if (!in) throw Error("cannot open label file '" + o.labels + "'");
    return read_labels(in, emb.ids());
  });
  std::vector<ClassificationResult> results;
  stage("evaluate", [&] {
    for (double ratio : o.ratios) {
      ClassifyOptions opts{.train_ratio = ratio, .multilabel = o.multilabel, .seed = o.pipeline.seed, .logreg = {}};
      opts.logreg.l2 = o.l2;
      results.push_back(classify_nodes(emb, labels, opts));
      if (!results.back().skipped_classes.empty() && o.pipeline.verbosity >= 1) {
        err << "ratio " << ratio << ": " << results.back().skipped_classes.size()
            << " class(es) absent from the training split were skipped\n";
      }
    }
  });
  stage("write", [&] {
    with_output(o.output, out, [&](std::ostream& s) {
      s << "task,param,metric,value,seed\n";
      for (std::size_t i = 0; i < results.size(); ++i) {
        write_row(s, "classification", o.ratios[i], "micro_f1", results[i].scores.micro, o.pipeline.seed);
        write_row(s, "classification", o.ratios[i], "macro_f1", results[i].scores.macro, o.pipeline.seed);
      }
    });
  });
}

void cmd_eval_link(const Options& o, std::ostream& out, std::ostream& err) {
  const LoadedGraph loaded = load_graph(o);
  std::vector<LinkPredictionResult> results;
  stage("evaluate", [&] {
    for (double fraction : o.fractions) {
      LinkPredictionOptions opts{.removal_fraction = fraction, .seed = o.pipeline.seed, .logreg = {}};
      opts.logreg.l2 = o.l2;
      auto embed = [&](const Graph& residual) { return embed_graph(residual, loaded.ids, o.pipeline, &err); };
      results.push_back(link_prediction(loaded.graph, opts, embed));
      if (results.back().removed < results.back().requested && o.pipeline.verbosity >= 1) {
        err << "fraction " << fraction << ": removed " << results.back().removed << " of "
            << results.back().requested << " requested edges\n";
      }
    }
  });
  stage("write", [&] {
    with_output(o.output, out, [&](std::ostream& s) {
      s << "task,param,metric,value,seed\n";
      for (std::size_t i = 0; i < results.size(); ++i) {
        write_row(s, "link_prediction", o.fractions[i], "accuracy", results[i].accuracy, o.pipeline.seed);
      }
    });
  });
}

void cmd_project(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.input, "--input");
  const Embeddings emb = stage("load", [&] { return read_embeddings_file(o.input); });
  const Projection proj = stage("project", [&] { return project_2d(emb); });
  if (proj.degenerate) err << "warning: all embedding vectors are identical; coordinates are zero\n";
  stage("write", [&] {
    with_output(o.output, out, [&](std::ostream& s) {
      for (NodeId v = 0; v < emb.num_nodes(); ++v) {
        s << emb.ids().label(v) << '\t' << detail::format_double(proj.coords[v][0]) << '\t'
          << detail::format_double(proj.coords[v][1]) << '\n';
      }
    });
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Node embeddings from factorized random-walk co-occurrence statistics", "netvec"};
  app.set_config("--config", "", "Flat key=value file; explicit flags take precedence");
  app.require_subcommand(1);
  Options o;
  add_options(app, o);

  auto* walk = app.add_subcommand("walk", "Write a random-walk corpus, one walk per line");
  auto* embed = app.add_subcommand("embed", "Learn embeddings and write them with the loss trace");
  auto* eval_class = app.add_subcommand("eval-class", "Node classification micro/macro F1 over training ratios");
  auto* eval_link = app.add_subcommand("eval-link", "Link prediction accuracy over edge removal fractions");
  auto* project = app.add_subcommand("project", "2-D PCA projection of an embedding file");
  for (auto* sub : {walk, embed, eval_class, eval_link, project}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*walk) cmd_walk(o, out);
    if (*embed) cmd_embed(o, err);
    if (*eval_class) cmd_eval_class(o, out, err);
    if (*eval_link) cmd_eval_link(o, out, err);
    if (*project) cmd_project(o, out, err);
  } catch (const std::exception& e) {
    err << "error " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace netvec::cli

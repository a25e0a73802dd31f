#include "netvec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "detail/text.hpp"
#include "netvec/error.hpp"
#include "netvec/random.hpp"

namespace netvec {

std::size_t LabeledNodes::num_labeled() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const auto& l) { return !l.empty(); }));
}

LabeledNodes read_labels(std::istream& in, const NodeIdMap& ids) {
  LabeledNodes out;
  out.labels.resize(ids.size());
  std::string line;
  std::size_t line_no = 0;
  int max_class = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    auto fields = detail::split_fields(line);
    auto cls = fields.size() == 2 ? detail::parse_number<int>(fields[1]) : std::nullopt;
    if (!cls || *cls < 0) throw ParseError(line_no, "expected '<node_label>\\t<class_id>' with class_id >= 0");
    auto node = ids.find(fields[0]);
    if (!node) throw ParseError(line_no, "unknown node '" + std::string(fields[0]) + "'");
    auto& list = out.labels[*node];
    if (std::find(list.begin(), list.end(), *cls) == list.end()) list.push_back(*cls);
    max_class = std::max(max_class, *cls);
  }
  for (auto& list : out.labels) std::sort(list.begin(), list.end());
  out.num_classes = static_cast<std::size_t>(max_class + 1);
  if (out.num_classes == 0) throw Error("label file contains no labels");
  return out;
}

std::vector<double> hadamard_feature(const Embeddings& emb, NodeId u, NodeId v) {
  auto a = emb[u];
  auto b = emb[v];
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

std::vector<Edge> sample_negatives(const Graph& g, std::size_t count, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  auto adjacent = [&](NodeId u, NodeId v) { return g.has_edge(u, v) || g.has_edge(v, u); };
  std::size_t linked_pairs = 0;
  for (const Edge& e : g.edges()) {
    if (!g.directed() || e.u < e.v || !g.has_edge(e.v, e.u)) ++linked_pairs;
  }
  const std::size_t total_pairs = n < 2 ? 0 : n * (n - 1) / 2;
  const std::size_t available = total_pairs - linked_pairs;
  if (count > available) {
    throw Error("cannot sample " + std::to_string(count) + " non-edges; only " + std::to_string(available) +
                " exist");
  }

  Rng rng(derive_seed(seed, {0x6e6567ULL}));
  std::vector<Edge> out;
  out.reserve(count);
  if (2 * count > available) {
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (!adjacent(u, v)) out.push_back({u, v, 1.0});
      }
    }
    std::shuffle(out.begin(), out.end(), rng);
    out.resize(count);
    return out;
  }
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::set<std::pair<NodeId, NodeId>> seen;
  while (out.size() < count) {
    NodeId u = pick(rng);
    NodeId v = pick(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (adjacent(u, v) || !seen.emplace(u, v).second) continue;
    out.push_back({u, v, 1.0});
  }
  return out;
}

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

double LinearClassifier::probability(const Eigen::Ref<const Eigen::VectorXd>& x) const { return sigmoid(decision(x)); }

LinearClassifier train_logreg(const Eigen::MatrixXd& features, std::span<const int> labels, const LogRegConfig& cfg) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (static_cast<std::size_t>(n) != labels.size()) throw Error("feature rows and labels differ in count");
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == n) throw Error("logistic regression needs examples of both classes");
  if (!(cfg.l2 >= 0.0)) throw Error("l2 strength must be non-negative");

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  auto objective = [&](const Eigen::VectorXd& ww, double bb) {
    const Eigen::VectorXd z = (features * ww).array() + bb;
    double f = 0.5 * cfg.l2 * ww.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) f += softplus(z[i]) - y[i] * z[i];
    return f;
  };

  LinearClassifier clf;
  double f = objective(w, b);
  for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
    const Eigen::VectorXd z = (features * w).array() + b;
    Eigen::VectorXd p(n), s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(z[i]);
      s[i] = p[i] * (1.0 - p[i]);
    }
    Eigen::VectorXd grad(d + 1);
    grad.head(d) = features.transpose() * (p - y) + cfg.l2 * w;
    grad[d] = (p - y).sum();
    clf.iterations = iter;
    if (grad.lpNorm<Eigen::Infinity>() < cfg.tolerance) {
      clf.converged = true;
      break;
    }

    Eigen::MatrixXd hess(d + 1, d + 1);
    hess.topLeftCorner(d, d) = features.transpose() * s.asDiagonal() * features;
    hess.topLeftCorner(d, d).diagonal().array() += cfg.l2;
    hess.topRightCorner(d, 1) = features.transpose() * s;
    hess.bottomLeftCorner(1, d) = hess.topRightCorner(d, 1).transpose();
    hess(d, d) = s.sum() + 1e-12;
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite() || grad.dot(step) <= 0.0) step = grad;

    double t = 1.0;
    const double slope = grad.dot(step);
    Eigen::VectorXd w_next;
    double b_next = b, f_next = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      w_next = w - t * step.head(d);
      b_next = b - t * step[d];
      f_next = objective(w_next, b_next);
      if (f_next <= f - 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No further decrease is representable; the current point is optimal to working precision.
      clf.converged = true;
      break;
    }
    w = std::move(w_next);
    b = b_next;
    f = f_next;
    clf.iterations = iter + 1;
  }
  clf.weights = std::move(w);
  clf.intercept = b;
  return clf;
}

F1Scores f1_scores(const std::vector<std::vector<int>>& truth, const std::vector<std::vector<int>>& predicted,
                   std::size_t num_classes, const std::vector<bool>& counted) {
  if (truth.size() != predicted.size()) throw Error("truth and prediction counts differ");
  if (counted.size() != num_classes) throw Error("class mask has the wrong length");
  std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  auto check = [&](int c) {
    if (c < 0 || static_cast<std::size_t>(c) >= num_classes) throw Error("class id out of range");
    return static_cast<std::size_t>(c);
  };
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::set<int> t(truth[i].begin(), truth[i].end());
    const std::set<int> p(predicted[i].begin(), predicted[i].end());
    for (int c : p) (t.count(c) ? tp : fp)[check(c)]++;
    for (int c : t) {
      if (!p.count(c)) fn[check(c)]++;
    }
  }
  auto f1 = [](std::size_t a, std::size_t b, std::size_t c) {
    const std::size_t denom = 2 * a + b + c;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(a) / static_cast<double>(denom);
  };
  F1Scores out;
  out.micro = f1(std::accumulate(tp.begin(), tp.end(), std::size_t{0}), std::accumulate(fp.begin(), fp.end(), std::size_t{0}),
                 std::accumulate(fn.begin(), fn.end(), std::size_t{0}));
  std::size_t classes = 0;
  double sum = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (!counted[c]) continue;
    sum += f1(tp[c], fp[c], fn[c]);
    ++classes;
  }
  out.macro = classes ? sum / static_cast<double>(classes) : 0.0;
  return out;
}

namespace {

Eigen::MatrixXd gather_rows(const Embeddings& emb, std::span<const NodeId> nodes) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(emb.dim()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto row = emb[nodes[i]];
    for (std::size_t j = 0; j < row.size(); ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
  }
  return x;
}

}  // namespace

ClassificationResult classify_nodes(const Embeddings& emb, const LabeledNodes& labels, const ClassifyOptions& options) {
  if (!(options.train_ratio > 0.0 && options.train_ratio < 1.0)) throw Error("train ratio must lie in (0, 1)");
  if (labels.labels.size() > emb.num_nodes()) throw Error("labels reference nodes without embeddings");

  std::vector<std::vector<NodeId>> strata(labels.num_classes);
  for (NodeId v = 0; v < labels.labels.size(); ++v) {
    if (!labels.labels[v].empty()) strata.at(static_cast<std::size_t>(labels.labels[v].front())).push_back(v);
  }
  std::vector<NodeId> train_nodes, test_nodes;
  for (std::size_t c = 0; c < strata.size(); ++c) {
    auto& group = strata[c];
    Rng rng(derive_seed(options.seed, {0x73706c6974ULL, c}));
    std::shuffle(group.begin(), group.end(), rng);
    const auto take = std::min(group.size(), static_cast<std::size_t>(std::llround(options.train_ratio * group.size())));
    train_nodes.insert(train_nodes.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(take));
    test_nodes.insert(test_nodes.end(), group.begin() + static_cast<std::ptrdiff_t>(take), group.end());
  }
  if (train_nodes.empty() || test_nodes.empty()) throw Error("train ratio leaves an empty train or test split");

  const Eigen::MatrixXd x_train = gather_rows(emb, train_nodes);
  const Eigen::MatrixXd x_test = gather_rows(emb, test_nodes);
  const auto num_test = static_cast<Eigen::Index>(test_nodes.size());
  const auto num_classes = static_cast<Eigen::Index>(labels.num_classes);
  Eigen::MatrixXd scores = Eigen::MatrixXd::Constant(num_test, num_classes, -std::numeric_limits<double>::infinity());

  ClassificationResult result;
  result.train_size = train_nodes.size();
  result.test_size = test_nodes.size();
  std::vector<bool> counted(labels.num_classes, true);
  std::vector<int> y(train_nodes.size());
  for (std::size_t c = 0; c < labels.num_classes; ++c) {
    for (std::size_t i = 0; i < train_nodes.size(); ++i) {
      const auto& l = labels.labels[train_nodes[i]];
      y[i] = std::binary_search(l.begin(), l.end(), static_cast<int>(c)) ? 1 : 0;
    }
    const auto positives = std::count(y.begin(), y.end(), 1);
    const auto col = static_cast<Eigen::Index>(c);
    if (positives == 0) {
      counted[c] = false;
      result.skipped_classes.push_back(static_cast<int>(c));
    } else if (positives == static_cast<std::ptrdiff_t>(y.size())) {
      scores.col(col).setConstant(std::numeric_limits<double>::max());
    } else {
      const LinearClassifier clf = train_logreg(x_train, y, options.logreg);
      scores.col(col) = (x_test * clf.weights).array() + clf.intercept;
    }
  }

  std::vector<std::vector<int>> truth(test_nodes.size()), predicted(test_nodes.size());
  std::vector<int> ranking(labels.num_classes);
  for (std::size_t i = 0; i < test_nodes.size(); ++i) {
    truth[i] = labels.labels[test_nodes[i]];
    const auto row = static_cast<Eigen::Index>(i);
    std::iota(ranking.begin(), ranking.end(), 0);
    std::stable_sort(ranking.begin(), ranking.end(), [&](int a, int b) { return scores(row, a) > scores(row, b); });
    const std::size_t usable = labels.num_classes - result.skipped_classes.size();
    const std::size_t k = options.multilabel ? std::min(truth[i].size(), usable) : std::min<std::size_t>(1, usable);
    predicted[i].assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k));
  }
  result.scores = f1_scores(truth, predicted, labels.num_classes, counted);
  return result;
}

LinkPredictionResult link_prediction(const Graph& g, const LinkPredictionOptions& options, const Embedder& embed) {
  EdgeRemoval removal = remove_edges_keep_connected(g, options.removal_fraction, derive_seed(options.seed, {1}));
  LinkPredictionResult result;
  result.requested = removal.requested;
  result.removed = removal.removed.size();
  if (result.removed == 0 || 2 * result.removed < result.requested) {
    throw Error("only " + std::to_string(result.removed) + " of " + std::to_string(result.requested) +
                " edges can be removed without disconnecting the graph");
  }

  const Embeddings emb = embed(removal.residual);
  if (emb.num_nodes() != g.num_nodes()) throw Error("embedding does not cover every node of the graph");

  struct Example {
    NodeId u, v;
    int label;
  };
  std::vector<Example> examples;
  for (const Edge& e : removal.removed) examples.push_back({e.u, e.v, 1});
  for (const Edge& e : sample_negatives(g, 2 * result.removed, derive_seed(options.seed, {2}))) {
    examples.push_back({e.u, e.v, 0});
  }
  Rng rng(derive_seed(options.seed, {3}));
  std::shuffle(examples.begin(), examples.end(), rng);

  const std::size_t n_train = examples.size() / 2;
  result.train_examples = n_train;
  result.test_examples = examples.size() - n_train;
  const auto dim = static_cast<Eigen::Index>(emb.dim());
  auto features = [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(end - begin), dim);
    for (std::size_t i = begin; i < end; ++i) {
      const auto h = hadamard_feature(emb, examples[i].u, examples[i].v);
      x.row(static_cast<Eigen::Index>(i - begin)) = Eigen::Map<const Eigen::RowVectorXd>(h.data(), dim);
    }
    return x;
  };
  std::vector<int> y_train;
  for (std::size_t i = 0; i < n_train; ++i) y_train.push_back(examples[i].label);
  const LinearClassifier clf = train_logreg(features(0, n_train), y_train, options.logreg);

  const Eigen::MatrixXd x_test = features(n_train, examples.size());
  const Eigen::VectorXd decision = (x_test * clf.weights).array() + clf.intercept;
  std::size_t correct = 0;
  for (std::size_t i = n_train; i < examples.size(); ++i) {
    const int predicted = decision[static_cast<Eigen::Index>(i - n_train)] > 0.0 ? 1 : 0;
    correct += predicted == examples[i].label;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(result.test_examples);
  return result;
}

Projection project_2d(const Embeddings& emb) {
  const std::size_t n = emb.num_nodes();
  const std::size_t d = emb.dim();
  if (n < 2 || d < 2) throw Error("projection needs at least 2 nodes and 2 dimensions");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (NodeId v = 0; v < n; ++v) {
    auto row = emb[v];
    for (std::size_t j = 0; j < d; ++j) x(v, static_cast<Eigen::Index>(j)) = row[j];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;

  Projection out;
  out.coords.assign(n, {0.0, 0.0});
  if (x.cwiseAbs().maxCoeff() == 0.0) {
    out.degenerate = true;
    return out;
  }
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("eigen decomposition failed");
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd axis = solver.eigenvectors().col(static_cast<Eigen::Index>(d) - 1 - c);
    const double scale = axis.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < axis.size(); ++j) {
      if (std::abs(axis[j]) > 1e-12 * scale) {
        if (axis[j] < 0.0) axis = -axis;
        break;
      }
    }
    out.variance[c] = std::max(0.0, solver.eigenvalues()[static_cast<Eigen::Index>(d) - 1 - c]);
    const Eigen::VectorXd proj = x * axis;
    for (std::size_t i = 0; i < n; ++i) out.coords[i][c] = proj[static_cast<Eigen::Index>(i)];
  }
  return out;
}

std::vector<int> kmeans(std::span<const std::array<double, 2>> points, std::size_t k, std::size_t max_iterations) {
  const std::size_t n = points.size();
  if (k < 1 || k > n) throw Error("k-means needs 1 <= k <= number of points");
  auto dist2 = [](const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]);
  };

  std::array<double, 2> mean{0.0, 0.0};
  for (const auto& p : points) {
    mean[0] += p[0] / static_cast<double>(n);
    mean[1] += p[1] / static_cast<double>(n);
  }
  std::vector<std::array<double, 2>> centers;
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = dist2(points[i], mean);
  while (centers.size() < k) {
    const auto far = static_cast<std::size_t>(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
    centers.push_back(points[far]);
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = centers.size() == 1 ? dist2(points[i], centers[0]) : std::min(nearest[i], dist2(points[i], centers.back()));
    }
  }

  std::vector<int> assign(n, -1);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      for (std::size_t c = 1; c < k; ++c) {
        if (dist2(points[i], centers[c]) < dist2(points[i], centers[static_cast<std::size_t>(best)])) best = static_cast<int>(c);
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::array<double, 2>> sums(k, {0.0, 0.0});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = static_cast<std::size_t>(assign[i]);
      sums[c][0] += points[i][0];
      sums[c][1] += points[i][1];
      ++counts[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c]) centers[c] = {sums[c][0] / static_cast<double>(counts[c]), sums[c][1] / static_cast<double>(counts[c])};
    }
  }
  return assign;
}

double cluster_agreement(std::span<const int> clusters, std::span<const int> truth) {
  if (clusters.size() != truth.size() || clusters.empty()) throw Error("cluster and truth sizes differ");
  const int k = std::max(*std::max_element(clusters.begin(), clusters.end()), *std::max_element(truth.begin(), truth.end())) + 1;
  if (k > 8) throw Error("cluster agreement supports at most 8 groups");
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) hits += perm[static_cast<std::size_t>(clusters[i])] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(clusters.size());
}

}  // namespace netvec

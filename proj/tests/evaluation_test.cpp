#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "netvec/error.hpp"
#include "netvec/evaluation.hpp"
#include "netvec/generators.hpp"
#include "netvec/random.hpp"
#include "support.hpp"

using namespace netvec;

namespace {

Embeddings make_embeddings(std::size_t dim, std::vector<double> values) {
  const std::size_t n = values.size() / dim;
  return Embeddings(NodeIdMap::identity(n), dim, std::move(values));
}

Embeddings random_embeddings(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n * dim);
  for (double& x : v) x = g(rng);
  return make_embeddings(dim, std::move(v));
}

std::set<std::pair<NodeId, NodeId>> edge_set(const Graph& g) {
  std::set<std::pair<NodeId, NodeId>> s;
  for (const Edge& e : g.edges()) s.emplace(std::min(e.u, e.v), std::max(e.u, e.v));
  return s;
}

double variance_along(const std::vector<std::array<double, 3>>& pts, const std::array<double, 3>& dir) {
  std::vector<double> proj;
  double mean = 0.0;
  for (const auto& p : pts) {
    proj.push_back(p[0] * dir[0] + p[1] * dir[1] + p[2] * dir[2]);
    mean += proj.back() / static_cast<double>(pts.size());
  }
  double var = 0.0;
  for (double x : proj) var += (x - mean) * (x - mean);
  return var / static_cast<double>(pts.size() - 1);
}

}  // namespace

TEST(Hadamard, Examples) {
  auto emb = make_embeddings(2, {1, 2, 3, -1, 0, 0});
  EXPECT_EQ(hadamard_feature(emb, 0, 1), (std::vector<double>{3, -2}));
  EXPECT_EQ(hadamard_feature(emb, 0, 0), (std::vector<double>{1, 4}));
  EXPECT_EQ(hadamard_feature(emb, 2, 1), (std::vector<double>{0, 0}));
}

TEST(HadamardProperty, Symmetric) {
  auto emb = random_embeddings(30, 16, 4);
  for (NodeId u = 0; u < 30; ++u) {
    for (NodeId v = 0; v < 30; ++v) {
      auto a = hadamard_feature(emb, u, v);
      EXPECT_EQ(a, hadamard_feature(emb, v, u));
      if (u == v) {
        for (double x : a) EXPECT_GE(x, 0.0);
      }
    }
  }
}

TEST(Negatives, Examples) {
  EXPECT_THROW(sample_negatives(testsupport::complete_graph(5), 1, 1), Error);
  auto path = sample_negatives(testsupport::path_graph(3), 1, 9);
  ASSERT_EQ(path.size(), 1u);
  EXPECT_EQ(path[0].u, 0u);
  EXPECT_EQ(path[0].v, 2u);
  EXPECT_THROW(sample_negatives(testsupport::path_graph(3), 2, 9), Error);
}

TEST(Negatives, KarateDistinctNonEdges) {
  auto k = testsupport::karate();
  auto edges = edge_set(k.graph);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto neg = sample_negatives(k.graph, 46, seed);
    ASSERT_EQ(neg.size(), 46u);
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const Edge& e : neg) {
      EXPECT_LT(e.u, e.v);
      EXPECT_FALSE(edges.count({e.u, e.v}));
      EXPECT_TRUE(seen.emplace(e.u, e.v).second);
    }
    EXPECT_EQ(neg.size(), sample_negatives(k.graph, 46, seed).size());
    EXPECT_EQ(neg.front().u, sample_negatives(k.graph, 46, seed).front().u);
  }
}

TEST(Negatives, DenseRequestTakesEveryNonEdge) {
  // 4-cycle has exactly two non-edges
  auto neg = sample_negatives(testsupport::cycle_graph(4), 2, 3);
  std::set<std::pair<NodeId, NodeId>> got;
  for (const Edge& e : neg) got.emplace(e.u, e.v);
  EXPECT_EQ(got, (std::set<std::pair<NodeId, NodeId>>{{0, 2}, {1, 3}}));
}

TEST(LogReg, SeparableOneDimensional) {
  Eigen::MatrixXd x(2, 1);
  x << -1, 1;
  std::vector<int> y{0, 1};
  LogRegConfig cfg;
  cfg.l2 = 1e-3;
  auto clf = train_logreg(x, y, cfg);
  EXPECT_LT(clf.decision(x.row(0).transpose()), 0.0);
  EXPECT_GT(clf.decision(x.row(1).transpose()), 0.0);
  EXPECT_TRUE(clf.converged);
}

TEST(LogReg, Errors) {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  std::vector<int> same{1, 1, 1};
  EXPECT_THROW(train_logreg(x, same), Error);
  std::vector<int> short_labels{0, 1};
  EXPECT_THROW(train_logreg(x, short_labels), Error);
  std::vector<int> y{0, 1, 1};
  LogRegConfig bad;
  bad.l2 = -1.0;
  EXPECT_THROW(train_logreg(x, y, bad), Error);
}

TEST(LogReg, StrongRegularizationPredictsMajority) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(40, 3);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) {
    y[static_cast<std::size_t>(i)] = i < 28 ? 1 : 0;
    for (int j = 0; j < 3; ++j) x(i, j) = g(rng) + (i < 28 ? 1.0 : -1.0);
  }
  LogRegConfig cfg;
  cfg.l2 = 1e12;
  auto clf = train_logreg(x, y, cfg);
  EXPECT_LT(clf.weights.norm(), 1e-9);
  for (int i = 0; i < 40; ++i) EXPECT_GT(clf.decision(x.row(i).transpose()), 0.0);
  EXPECT_NEAR(clf.probability(x.row(0).transpose()), 0.7, 1e-6);
}

TEST(LogReg, GradientVanishesAtSolution) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(60, 4);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 4; ++j) x(i, j) = g(rng);
    y[static_cast<std::size_t>(i)] = x(i, 0) - x(i, 2) + g(rng) > 0.0 ? 1 : 0;
  }
  LogRegConfig cfg;
  cfg.l2 = 0.5;
  auto clf = train_logreg(x, y, cfg);
  Eigen::VectorXd grad = cfg.l2 * clf.weights;
  double gb = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double r = clf.probability(x.row(i).transpose()) - y[static_cast<std::size_t>(i)];
    grad += r * x.row(i).transpose();
    gb += r;
  }
  EXPECT_LT(grad.lpNorm<Eigen::Infinity>(), 1e-7);
  EXPECT_LT(std::abs(gb), 1e-7);
}

TEST(F1, AllOneClassOnBalancedSet) {
  std::vector<std::vector<int>> truth{{0}, {0}, {1}, {1}};
  std::vector<std::vector<int>> pred{{0}, {0}, {0}, {0}};
  auto s = f1_scores(truth, pred, 2, {true, true});
  EXPECT_DOUBLE_EQ(s.micro, 0.5);
  EXPECT_DOUBLE_EQ(s.macro, (2.0 / 3.0 + 0.0) / 2.0);
}

TEST(F1, SkippedClassLeavesMacro) {
  std::vector<std::vector<int>> truth{{0}, {1}, {2}};
  std::vector<std::vector<int>> pred{{0}, {1}, {0}};
  auto s = f1_scores(truth, pred, 3, {true, true, false});
  EXPECT_DOUBLE_EQ(s.macro, (2.0 / 3.0 + 1.0) / 2.0);
}

TEST(F1Property, MatchesConfusionCount) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t classes = 1 + trial % 5;
    const std::size_t nodes = 1 + rng() % 20;
    std::vector<std::vector<int>> truth(nodes), pred(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      for (std::size_t c = 0; c < classes; ++c) {
        if (rng() % 3 == 0) truth[i].push_back(static_cast<int>(c));
        if (rng() % 3 == 0) pred[i].push_back(static_cast<int>(c));
      }
    }
    std::vector<bool> counted(classes);
    for (std::size_t c = 0; c < classes; ++c) counted[c] = rng() % 4 != 0;
    auto got = f1_scores(truth, pred, classes, counted);
    auto want = testsupport::brute_f1(truth, pred, classes, counted);
    EXPECT_NEAR(got.micro, want.micro, 1e-12);
    EXPECT_NEAR(got.macro, want.macro, 1e-12);
  }
}

TEST(Classify, OneHotSeparable) {
  const std::size_t n = 30, classes = 3;
  std::vector<double> v(n * classes, 0.0);
  LabeledNodes labels;
  labels.num_classes = classes;
  labels.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i * classes + i % classes] = 1.0;
    labels.labels[i] = {static_cast<int>(i % classes)};
  }
  auto emb = make_embeddings(classes, v);
  for (double ratio : {0.1, 0.5, 0.9}) {
    ClassifyOptions opt;
    opt.train_ratio = ratio;
    auto r = classify_nodes(emb, labels, opt);
    EXPECT_DOUBLE_EQ(r.scores.micro, 1.0);
    EXPECT_DOUBLE_EQ(r.scores.macro, 1.0);
    EXPECT_EQ(r.train_size + r.test_size, n);
  }
}

TEST(Classify, MultilabelTopK) {
  // nodes carry classes {0}, {1} or {0,1}; coordinates are the indicator vectors
  const std::size_t n = 30;
  std::vector<double> v;
  LabeledNodes labels;
  labels.num_classes = 2;
  for (std::size_t i = 0; i < n; ++i) {
    const int kind = static_cast<int>(i % 3);
    v.push_back(kind != 1 ? 1.0 : 0.0);
    v.push_back(kind != 0 ? 1.0 : 0.0);
    labels.labels.push_back(kind == 0 ? std::vector<int>{0} : kind == 1 ? std::vector<int>{1} : std::vector<int>{0, 1});
  }
  ClassifyOptions opt;
  opt.multilabel = true;
  auto r = classify_nodes(make_embeddings(2, v), labels, opt);
  EXPECT_DOUBLE_EQ(r.scores.micro, 1.0);
}

TEST(Classify, DeterministicAndErrors) {
  auto emb = random_embeddings(40, 8, 1);
  LabeledNodes labels;
  labels.num_classes = 2;
  for (std::size_t i = 0; i < 40; ++i) labels.labels.push_back({static_cast<int>(i % 2)});
  ClassifyOptions opt;
  opt.seed = 12;
  auto a = classify_nodes(emb, labels, opt);
  auto b = classify_nodes(emb, labels, opt);
  EXPECT_EQ(a.scores.micro, b.scores.micro);
  EXPECT_EQ(a.scores.macro, b.scores.macro);
  opt.train_ratio = 1.0;
  EXPECT_THROW(classify_nodes(emb, labels, opt), Error);
  opt.train_ratio = 0.0;
  EXPECT_THROW(classify_nodes(emb, labels, opt), Error);
}

TEST(Classify, ClassMissingFromTrainingIsSkipped) {
  // class 2 has one member, which rounds into the test split at ratio 0.4
  std::vector<double> v;
  LabeledNodes labels;
  labels.num_classes = 3;
  for (std::size_t i = 0; i < 21; ++i) {
    const int c = i == 20 ? 2 : static_cast<int>(i % 2);
    v.push_back(c == 0 ? 1.0 : 0.0);
    v.push_back(c == 1 ? 1.0 : 0.0);
    labels.labels.push_back({c});
  }
  ClassifyOptions opt;
  opt.train_ratio = 0.4;
  auto r = classify_nodes(make_embeddings(2, v), labels, opt);
  EXPECT_EQ(r.skipped_classes, std::vector<int>{2});
}

TEST(ReadLabels, ParsesAndRejects) {
  auto ids = NodeIdMap::identity(3);
  std::istringstream in("# comment\n0\t1\n2\t0\n2\t3\n");
  auto l = read_labels(in, ids);
  EXPECT_EQ(l.num_classes, 4u);
  EXPECT_EQ(l.labels[2], (std::vector<int>{0, 3}));
  EXPECT_TRUE(l.labels[1].empty());
  EXPECT_EQ(l.num_labeled(), 2u);
  std::istringstream unknown("7\t0\n");
  EXPECT_THROW(read_labels(unknown, ids), ParseError);
  std::istringstream negative("0\t-1\n");
  EXPECT_THROW(read_labels(negative, ids), ParseError);
}

TEST(LinkPrediction, SampleMembershipAndDeterminism) {
  auto sbm = stochastic_block_model({40, 40}, 0.2, 0.02, 5);
  ASSERT_TRUE(is_connected(sbm.graph));
  const auto original = edge_set(sbm.graph);
  LinkPredictionOptions opt;
  opt.seed = 8;
  std::set<std::pair<NodeId, NodeId>> residual;
  auto embed = [&](const Graph& r) {
    residual = edge_set(r);
    EXPECT_TRUE(is_connected(r));
    return random_embeddings(r.num_nodes(), 16, 3);
  };
  auto a = link_prediction(sbm.graph, opt, embed);
  EXPECT_EQ(a.requested, static_cast<std::size_t>(std::llround(0.3 * static_cast<double>(original.size()))));
  EXPECT_EQ(residual.size() + a.removed, original.size());
  for (const auto& e : residual) EXPECT_TRUE(original.count(e));
  EXPECT_EQ(a.train_examples + a.test_examples, 3 * a.removed);
  auto b = link_prediction(sbm.graph, opt, embed);
  EXPECT_EQ(a.accuracy, b.accuracy);

  // the removed edges and negatives as the protocol builds them
  auto removal = remove_edges_keep_connected(sbm.graph, 0.3, derive_seed(opt.seed, {1}));
  for (const Edge& e : removal.removed) {
    const std::pair<NodeId, NodeId> key{std::min(e.u, e.v), std::max(e.u, e.v)};
    EXPECT_TRUE(original.count(key));
    EXPECT_FALSE(residual.count(key));
  }
  for (const Edge& e : sample_negatives(sbm.graph, 2 * removal.removed.size(), derive_seed(opt.seed, {2}))) {
    EXPECT_NE(e.u, e.v);
    EXPECT_FALSE(original.count({e.u, e.v}));
  }
}

TEST(LinkPrediction, ShortfallIsReported) {
  // a tree admits no removal that keeps it connected
  auto embed = [](const Graph& r) { return random_embeddings(r.num_nodes(), 4, 1); };
  EXPECT_THROW(link_prediction(testsupport::star_graph(8), {}, embed), Error);
}

TEST(Project, CenteredTwoDimensionalIsRotation) {
  auto emb = make_embeddings(2, {1, 2, -3, 0.5, 2, -1, 0, -1.5});
  auto p = project_2d(emb);
  ASSERT_FALSE(p.degenerate);
  EXPECT_GE(p.variance[0], p.variance[1]);
  for (NodeId a = 0; a < 4; ++a) {
    for (NodeId b = 0; b < 4; ++b) {
      const double d0 = std::hypot(emb[a][0] - emb[b][0], emb[a][1] - emb[b][1]);
      const double d1 = std::hypot(p.coords[a][0] - p.coords[b][0], p.coords[a][1] - p.coords[b][1]);
      EXPECT_NEAR(d0, d1, 1e-12);
    }
  }
}

TEST(Project, IdenticalVectorsAreDegenerate) {
  auto p = project_2d(make_embeddings(3, {1, 2, 3, 1, 2, 3, 1, 2, 3}));
  EXPECT_TRUE(p.degenerate);
  for (const auto& c : p.coords) {
    EXPECT_EQ(c[0], 0.0);
    EXPECT_EQ(c[1], 0.0);
  }
  EXPECT_THROW(project_2d(make_embeddings(2, {1, 2})), Error);
  EXPECT_THROW(project_2d(make_embeddings(1, {1, 2, 3})), Error);
}

TEST(Project, SignConvention) {
  auto p = project_2d(make_embeddings(2, {-2, 0, 2, 0, 0, -0.5, 0, 0.5}));
  // first axis is +x, so the node at x = 2 lands on the positive side
  EXPECT_NEAR(p.coords[1][0], 2.0, 1e-12);
  EXPECT_NEAR(p.coords[3][1], 0.5, 1e-12);
}

TEST(ProjectProperty, VarianceOrderingAgainstRotationSearch) {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + trial % 20;
    std::vector<std::array<double, 3>> pts(n);
    std::vector<double> flat;
    const double sx = 1.0 + trial % 3, sy = 0.5 + trial % 2;
    for (auto& q : pts) {
      q = {sx * g(rng), sy * g(rng), 0.7 * g(rng)};
      flat.insert(flat.end(), q.begin(), q.end());
    }
    auto p = project_2d(make_embeddings(3, flat));
    // component variances are what the coordinates carry
    for (int c = 0; c < 2; ++c) {
      double mean = 0.0, var = 0.0;
      for (const auto& x : p.coords) mean += x[c] / static_cast<double>(n);
      for (const auto& x : p.coords) var += (x[c] - mean) * (x[c] - mean);
      EXPECT_NEAR(var / static_cast<double>(n - 1), p.variance[c], 1e-9 * (1.0 + p.variance[c]));
    }
    EXPECT_GE(p.variance[0], p.variance[1]);
    // no direction on a sphere grid beats the first component, and the
    // smallest-variance direction does not beat the second
    double best = 0.0, worst = std::numeric_limits<double>::infinity();
    const int steps = 90;
    for (int i = 0; i <= steps; ++i) {
      const double theta = std::numbers::pi * i / steps;
      for (int j = 0; j < 2 * steps; ++j) {
        const double phi = std::numbers::pi * j / steps;
        const std::array<double, 3> dir{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                                        std::cos(theta)};
        const double v = variance_along(pts, dir);
        best = std::max(best, v);
        worst = std::min(worst, v);
      }
    }
    EXPECT_GE(p.variance[0], best - 1e-12 * best);
    EXPECT_GE(p.variance[1], worst);
    EXPECT_LE(p.variance[1], p.variance[0]);
  }
}

TEST(KMeans, TwoBlobs) {
  std::vector<std::array<double, 2>> pts{{0, 0}, {0.1, 0}, {0, 0.2}, {5, 5}, {5.1, 5}, {5, 4.9}};
  auto a = kmeans(pts, 2);
  EXPECT_EQ(a[0], a[1]);
  EXPECT_EQ(a[0], a[2]);
  EXPECT_EQ(a[3], a[4]);
  EXPECT_NE(a[0], a[3]);
  EXPECT_EQ(a, kmeans(pts, 2));
  EXPECT_THROW(kmeans(pts, 0), Error);
  EXPECT_THROW(kmeans(pts, 7), Error);
}

TEST(ClusterAgreement, BestRelabeling) {
  std::vector<int> c{1, 1, 0, 0, 0};
  std::vector<int> t{0, 0, 1, 1, 0};
  EXPECT_DOUBLE_EQ(cluster_agreement(c, t), 0.8);
  EXPECT_DOUBLE_EQ(cluster_agreement(t, t), 1.0);
  std::vector<int> shorter{0};
  EXPECT_THROW(cluster_agreement(c, shorter), Error);
}

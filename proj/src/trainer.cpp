#include "netvec/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

#include "netvec/error.hpp"
#include "netvec/parallel.hpp"
#include "netvec/random.hpp"

namespace netvec {
namespace {

// Four interleaved partial sums; fixed order, so results are reproducible.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

double EmbeddingModel::score(NodeId m, NodeId k) const {
  double s = dot(center_row(m).data(), context_row(k).data(), dim);
  if (bias_enabled) s += center_bias[m] + context_bias[k];
  return s;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw Error("learning rate must be non-negative");
  if (epochs < 1) throw Error("epochs must be at least 1");
}

EmbeddingModel init_model(std::size_t num_nodes, std::size_t dim, bool bias_enabled, std::uint64_t seed) {
  if (dim < 1) throw Error("embedding dimension must be at least 1");
  EmbeddingModel model;
  model.num_nodes = num_nodes;
  model.dim = dim;
  model.bias_enabled = bias_enabled;
  model.center.resize(num_nodes * dim);
  model.context.resize(num_nodes * dim);
  Rng rng(derive_seed(seed, {0x696e6974ULL}));
  const double half_width = 0.5 / static_cast<double>(dim);
  auto draw = [&] {
    double u = uniform01(rng);
    while (u == 0.0) u = uniform01(rng);
    return (2.0 * u - 1.0) * half_width;
  };
  std::generate(model.center.begin(), model.center.end(), draw);
  std::generate(model.context.begin(), model.context.end(), draw);
  model.center_bias.assign(num_nodes, 0.0);
  model.context_bias.assign(num_nodes, 0.0);
  model.center_acc.assign(num_nodes * dim, 1.0);
  model.context_acc.assign(num_nodes * dim, 1.0);
  model.center_bias_acc.assign(num_nodes, 1.0);
  model.context_bias_acc.assign(num_nodes, 1.0);
  return model;
}

namespace {

void check_entry(const EmbeddingModel& model, const TrainingEntry& e) {
  if (e.m >= model.num_nodes || e.k >= model.num_nodes) {
    throw Error("training entry (" + std::to_string(e.m) + ", " + std::to_string(e.k) + ") is outside the model");
  }
}

struct PlainAccess {
  static double load(const double& x) { return x; }
  static void store(double& x, double v) { x = v; }
};

// Lock-free shared updates: each double is read and written atomically, but
// concurrent workers may interleave between a load and its store.
struct RelaxedAccess {
  static double load(const double& x) {
    return std::atomic_ref<double>(const_cast<double&>(x)).load(std::memory_order_relaxed);
  }
  static void store(double& x, double v) { std::atomic_ref<double>(x).store(v, std::memory_order_relaxed); }
};

// Working copies of the rows touched by one entry.
struct RowBuffers {
  explicit RowBuffers(std::size_t dim) : w(dim), c(dim), wa(dim), ca(dim) {}
  std::vector<double> w, c, wa, ca;
};

template <class Access>
void copy_in(const double* src, std::vector<double>& dst) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = Access::load(src[i]);
}

template <class Access>
void copy_out(const std::vector<double>& src, double* dst) {
  for (std::size_t i = 0; i < src.size(); ++i) Access::store(dst[i], src[i]);
}

// 1/sqrt(a) for a >= 1: hardware estimate (rel. error < 2^-14) and two Newton
// steps, which lands within a few ulp of the exact value.
#if defined(__AVX512F__)
inline __m512d inv_sqrt(__m512d a) {
  const __m512d half = _mm512_set1_pd(0.5);
  const __m512d three_halves = _mm512_set1_pd(1.5);
  __m512d y = _mm512_rsqrt14_pd(a);
  const __m512d ha = _mm512_mul_pd(half, a);
  y = _mm512_mul_pd(y, _mm512_fnmadd_pd(ha, _mm512_mul_pd(y, y), three_halves));
  y = _mm512_mul_pd(y, _mm512_fnmadd_pd(ha, _mm512_mul_pd(y, y), three_halves));
  return y;
}
#endif

// One AdaGrad step on a center row w and context row c with shared
// coefficient p*r: g_w = coef*c, g_c = coef*w.
void adagrad_rows(double* __restrict w, double* __restrict c, double* __restrict wa, double* __restrict ca,
                  std::size_t dim, double coef, double lr) {
  std::size_t i = 0;
#if defined(__AVX512F__)
  const __m512d vcoef = _mm512_set1_pd(coef);
  const __m512d vlr = _mm512_set1_pd(lr);
  for (; i + 8 <= dim; i += 8) {
    const __m512d vw = _mm512_loadu_pd(w + i);
    const __m512d vc = _mm512_loadu_pd(c + i);
    const __m512d vwa = _mm512_loadu_pd(wa + i);
    const __m512d vca = _mm512_loadu_pd(ca + i);
    const __m512d gw = _mm512_mul_pd(vcoef, vc);
    const __m512d gc = _mm512_mul_pd(vcoef, vw);
    _mm512_storeu_pd(w + i, _mm512_fnmadd_pd(_mm512_mul_pd(vlr, gw), inv_sqrt(vwa), vw));
    _mm512_storeu_pd(c + i, _mm512_fnmadd_pd(_mm512_mul_pd(vlr, gc), inv_sqrt(vca), vc));
    _mm512_storeu_pd(wa + i, _mm512_fmadd_pd(gw, gw, vwa));
    _mm512_storeu_pd(ca + i, _mm512_fmadd_pd(gc, gc, vca));
  }
#endif
  for (; i < dim; ++i) {
    const double gw = coef * c[i];
    const double gc = coef * w[i];
    w[i] -= lr * gw / std::sqrt(wa[i]);
    c[i] -= lr * gc / std::sqrt(ca[i]);
    wa[i] += gw * gw;
    ca[i] += gc * gc;
  }
}

// The visiting order is random, so the rows of an entry a few steps ahead are
// requested early.
void prefetch_rows(const EmbeddingModel& model, const TrainingEntry& e) {
  const std::size_t dim = model.dim;
  const double* rows[] = {model.center.data() + e.m * dim, model.context.data() + e.k * dim,
                          model.center_acc.data() + e.m * dim, model.context_acc.data() + e.k * dim};
  for (const double* row : rows) {
    for (std::size_t i = 0; i < dim; i += 8) __builtin_prefetch(row + i, 1);
  }
}

constexpr std::size_t kPrefetchAhead = 2;

template <class Access>
inline void adagrad_scalar(double& param, double& acc, double grad, double lr) {
  const double a = Access::load(acc);
  Access::store(param, Access::load(param) - lr * grad / std::sqrt(a));
  Access::store(acc, a + grad * grad);
}

template <class Access>
void apply_entry(EmbeddingModel& model, const TrainingEntry& e, double lr, RowBuffers& buf) {
  const std::size_t dim = model.dim;
  double* w = model.center.data() + e.m * dim;
  double* c = model.context.data() + e.k * dim;
  double* wa = model.center_acc.data() + e.m * dim;
  double* ca = model.context_acc.data() + e.k * dim;
  copy_in<Access>(w, buf.w);
  copy_in<Access>(c, buf.c);
  copy_in<Access>(wa, buf.wa);
  copy_in<Access>(ca, buf.ca);

  double r = dot(buf.w.data(), buf.c.data(), dim) - e.target;
  if (model.bias_enabled) r += Access::load(model.center_bias[e.m]) + Access::load(model.context_bias[e.k]);
  const double coef = e.penalty * r;

  adagrad_rows(buf.w.data(), buf.c.data(), buf.wa.data(), buf.ca.data(), dim, coef, lr);
  copy_out<Access>(buf.w, w);
  copy_out<Access>(buf.c, c);
  copy_out<Access>(buf.wa, wa);
  copy_out<Access>(buf.ca, ca);
  if (model.bias_enabled) {
    adagrad_scalar<Access>(model.center_bias[e.m], model.center_bias_acc[e.m], coef, lr);
    adagrad_scalar<Access>(model.context_bias[e.k], model.context_bias_acc[e.k], coef, lr);
  }
}

}  // namespace

double entry_residual(const EmbeddingModel& model, const TrainingEntry& e) {
  check_entry(model, e);
  return model.score(e.m, e.k) - e.target;
}

double loss(const EmbeddingModel& model, std::span<const TrainingEntry> entries, std::size_t threads) {
  for (const TrainingEntry& e : entries) check_entry(model, e);
  threads = std::max<std::size_t>(1, std::min(threads, entries.size()));
  std::vector<double> partial(threads, 0.0);
  parallel_blocks(entries.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t t) {
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double r = model.score(entries[i].m, entries[i].k) - entries[i].target;
      sum += entries[i].penalty * r * r;
    }
    partial[t] = sum;
  });
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

EntryGradients entry_gradients(const EmbeddingModel& model, const TrainingEntry& e) {
  check_entry(model, e);
  auto w = model.center_row(e.m);
  auto c = model.context_row(e.k);
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(w.begin(), w.end(), finite) || !std::all_of(c.begin(), c.end(), finite) ||
      (model.bias_enabled && (!finite(model.center_bias[e.m]) || !finite(model.context_bias[e.k])))) {
    throw DivergenceError("non-finite parameters for entry (" + std::to_string(e.m) + ", " +
                          std::to_string(e.k) + ")");
  }
  const double coef = e.penalty * entry_residual(model, e);
  EntryGradients g;
  g.center.resize(model.dim);
  g.context.resize(model.dim);
  for (std::size_t i = 0; i < model.dim; ++i) {
    g.center[i] = coef * c[i];
    g.context[i] = coef * w[i];
  }
  if (model.bias_enabled) {
    g.center_bias = coef;
    g.context_bias = coef;
  }
  return g;
}

std::vector<double> train(EmbeddingModel& model, std::span<const TrainingEntry> entries, const TrainConfig& cfg) {
  cfg.validate();
  if (entries.empty()) throw Error("no training entries");
  for (const TrainingEntry& e : entries) check_entry(model, e);

  std::size_t workers = cfg.deterministic ? 1 : std::max<std::size_t>(cfg.threads, 1);
  if (cfg.limit_to_hardware) workers = std::min<std::size_t>(workers, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<TrainingEntry> shuffled(entries.size());
  std::vector<double> trace;
  trace.reserve(cfg.epochs);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, {0x65706f6368ULL, epoch}));
    std::shuffle(order.begin(), order.end(), rng);
    // A contiguous copy in visiting order keeps the row addresses of upcoming
    // entries off the critical path of cache misses.
    for (std::size_t i = 0; i < order.size(); ++i) shuffled[i] = entries[order[i]];
    if (workers == 1) {
      RowBuffers buf(model.dim);
      for (std::size_t i = 0; i < shuffled.size(); ++i) {
        if (i + kPrefetchAhead < shuffled.size()) prefetch_rows(model, shuffled[i + kPrefetchAhead]);
        apply_entry<PlainAccess>(model, shuffled[i], cfg.learning_rate, buf);
      }
    } else {
      parallel_blocks(order.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t) {
        RowBuffers buf(model.dim);
        for (std::size_t i = begin; i < end; ++i) {
          if (i + kPrefetchAhead < end) prefetch_rows(model, shuffled[i + kPrefetchAhead]);
          apply_entry<RelaxedAccess>(model, shuffled[i], cfg.learning_rate, buf);
        }
      });
    }
    const double epoch_loss = loss(model, entries, workers);
    if (!std::isfinite(epoch_loss)) {
      throw DivergenceError("loss became non-finite in epoch " + std::to_string(epoch + 1) +
                            "; lower the learning rate");
    }
    trace.push_back(epoch_loss);
  }
  return trace;
}

}  // namespace netvec

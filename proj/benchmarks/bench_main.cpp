#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lagraph/bounds.hpp"
#include "lagraph/graph.hpp"
#include "lagraph/loss.hpp"
#include "lagraph/models.hpp"
#include "lagraph/ops.hpp"
#include "lagraph/training.hpp"

using namespace lagraph;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = n(rng);
  return m;
}

Graph random_graph(std::size_t n, std::size_t d, double p, Rng& rng) {
  std::bernoulli_distribution edge(p);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (edge(rng)) edges.emplace_back(u, v);
  return make_graph(n, edges, random_matrix(n, d, rng), std::size_t{0});
}

void bm_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Matrix a = random_matrix(n, n, rng), b = random_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(multiply(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(bm_matmul)->Arg(64)->Arg(256)->Arg(512);

void bm_spmm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const Graph g = random_graph(n, 4, 8.0 / static_cast<double>(n), rng);
  const GraphBatch batch = batch_graphs(std::span<const Graph>(&g, 1));
  const Value h = Value::constant(random_matrix(n, 64, rng));
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(spmm(batch.normalized, h).value());
}
BENCHMARK(bm_spmm)->Arg(1000)->Arg(10000);

void bm_training_step(benchmark::State& state) {
  Rng rng(3);
  GraphDataset ds;
  for (int i = 0; i < 128; ++i) {
    Graph g = random_graph(18, 7, 0.12, rng);
    g.features = degree_onehot(g, 6);
    ds.graphs.push_back(std::move(g));
  }
  ds.feature_dim = 7;
  ds.num_classes = 1;
  TrainConfig cfg = default_config(Level::graph);
  cfg.epochs = 1;
  cfg.learning_rate = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(train(ds, cfg).steps.size());
}
BENCHMARK(bm_training_step)->Unit(benchmark::kMillisecond);

void bm_bound_estimate(benchmark::State& state) {
  Rng rng(4);
  const TrialConfig t = random_trial(rng);
  const SyntheticSetup s = make_setup(t.setup, rng);
  Encoder enc = make_encoder(t.encoder, rng);
  Decoder dec = make_decoder(t.decoder, rng);
  MonteCarloOptions mc;
  mc.n_samples = 64;
  mc.n_masks = 4;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_theorem1(gnn_network(enc, dec), s, mc, rng).slack);
}
BENCHMARK(bm_bound_estimate);

}  // namespace

BENCHMARK_MAIN();

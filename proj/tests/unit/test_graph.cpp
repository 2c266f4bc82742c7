#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "lagraph/datasets.hpp"
#include "lagraph/execution.hpp"
#include "lagraph/graph.hpp"
#include "lagraph/models.hpp"
#include "test_support.hpp"

using namespace lagraph;
using lagraph::testing::random_graph;
using lagraph::testing::random_matrix;
using lagraph::testing::TempDir;
using lagraph::testing::write_file;

namespace {

Graph path_graph(std::size_t n, std::size_t d = 1) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return make_graph(n, e, Matrix(n, d, 1.0));
}

Graph star_graph(std::size_t leaves) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return make_graph(leaves + 1, e, Matrix(leaves + 1, 1, 1.0));
}

void write_tu(const std::filesystem::path& dir, const std::string& name, const std::string& a,
              const std::string& indicator, const std::string& labels,
              const std::string& node_labels = "") {
  write_file(dir / (name + "_A.txt"), a);
  write_file(dir / (name + "_graph_indicator.txt"), indicator);
  write_file(dir / (name + "_graph_labels.txt"), labels);
  if (!node_labels.empty()) write_file(dir / (name + "_node_labels.txt"), node_labels);
}

void expect_graph_invariants(const Graph& g) {
  const Matrix a = g.adjacency->to_dense();
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    EXPECT_EQ(a(i, i), 0.0);
    for (std::size_t j = 0; j < g.num_nodes(); ++j) {
      EXPECT_EQ(a(i, j), a(j, i));
      EXPECT_TRUE(a(i, j) == 0.0 || a(i, j) == 1.0);
    }
  }
  EXPECT_EQ(g.features.rows(), g.num_nodes());
}

const std::filesystem::path mutag_dir = std::filesystem::path(LAGRAPH_TEST_DATA_DIR) / "MUTAG";

}  // namespace

TEST(MakeGraph, DeduplicatesSymmetrizesAndDropsSelfLoops) {
  const std::vector<Edge> edges = {{0, 1}, {1, 0}, {0, 1}, {2, 2}, {1, 2}};
  const Graph g = make_graph(3, edges, Matrix(3, 2));
  EXPECT_EQ(g.num_edges(), 2u);
  expect_graph_invariants(g);
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {1, 2}}));
}

TEST(MakeGraph, FeatureRowMismatchThrows) {
  const std::vector<Edge> edges = {{0, 1}};
  EXPECT_THROW(make_graph(3, edges, Matrix(2, 2)), std::invalid_argument);
}

TEST(ParseTudataset, TwoNodeExample) {
  TempDir dir("tu2");
  write_tu(dir.path(), "T", "1, 2\n2, 1\n", "1\n1\n", "1\n");
  const GraphDataset ds = parse_tudataset(dir.path(), "T");
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.graphs[0].num_nodes(), 2u);
  EXPECT_EQ(ds.graphs[0].num_edges(), 1u);
  EXPECT_EQ(ds.labels(), std::vector<std::size_t>{0});
}

TEST(ParseTudataset, CrossGraphEdgeIsRejected) {
  TempDir dir("tucross");
  write_tu(dir.path(), "T", "1, 3\n", "1\n1\n2\n", "1\n2\n");
  EXPECT_THROW(parse_tudataset(dir.path(), "T"), DatasetError);
}

TEST(ParseTudataset, MissingFileAndBadTokenAreRejected) {
  TempDir dir("tumissing");
  write_file(dir.path() / "T_A.txt", "1, 2\n");
  EXPECT_THROW(parse_tudataset(dir.path(), "T"), DatasetError);
  TempDir bad("tubad");
  write_tu(bad.path(), "T", "1, x\n", "1\n1\n", "1\n");
  EXPECT_THROW(parse_tudataset(bad.path(), "T"), DatasetError);
}

TEST(ParseTudataset, LabelsRemappedAndNodeLabelsOneHot) {
  TempDir dir("tulabels");
  write_tu(dir.path(), "T", "1, 2\n3, 4\n", "1\n1\n2\n2\n", "-1\n1\n", "5\n2\n2\n9\n");
  const GraphDataset ds = parse_tudataset(dir.path(), "T");
  EXPECT_EQ(ds.num_classes, 2u);
  EXPECT_EQ(ds.labels(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(ds.feature_dim, 3u);
  EXPECT_EQ(ds.graphs[0].features, Matrix::from_rows({{0, 1, 0}, {1, 0, 0}}));
  EXPECT_EQ(ds.graphs[1].features, Matrix::from_rows({{1, 0, 0}, {0, 0, 1}}));
}

TEST(ParseTudataset, UnattributedUsesClampedDegreeOneHot) {
  TempDir dir("tudeg");
  write_tu(dir.path(), "T", "1, 2\n1, 3\n1, 4\n", "1\n1\n1\n1\n", "0\n");
  const GraphDataset ds = parse_tudataset(dir.path(), "T", 2);
  EXPECT_EQ(ds.feature_dim, 3u);
  EXPECT_EQ(ds.graphs[0].features, Matrix::from_rows({{0, 0, 1}, {0, 1, 0}, {0, 1, 0}, {0, 1, 0}}));
}

TEST(ParseTudataset, Mutag) {
  if (!std::filesystem::exists(mutag_dir)) GTEST_SKIP() << "MUTAG not present";
  const GraphDataset ds = parse_tudataset(mutag_dir, "MUTAG");
  EXPECT_EQ(ds.size(), 188u);
  EXPECT_EQ(ds.feature_dim, 7u);
  EXPECT_EQ(ds.num_classes, 2u);
  std::size_t nodes = 0;
  for (const Graph& g : ds.graphs) {
    nodes += g.num_nodes();
    expect_graph_invariants(g);
    EXPECT_EQ(g.feature_dim(), 7u);
    ASSERT_TRUE(g.label.has_value());
    EXPECT_LT(*g.label, ds.num_classes);
  }
  EXPECT_NEAR(static_cast<double>(nodes) / 188.0, 17.93, 0.01);
  EXPECT_NO_THROW(ds.validate());
}

TEST(DegreeOnehot, Examples) {
  const Graph isolated = make_graph(1, std::vector<Edge>{}, Matrix(1, 1));
  Matrix e0(1, 6);
  e0(0, 0) = 1.0;
  EXPECT_EQ(degree_onehot(isolated, 5), e0);

  const Graph star = star_graph(200);
  const Matrix f = degree_onehot(star, 128);
  EXPECT_EQ(f.cols(), 129u);
  EXPECT_EQ(f(0, 128), 1.0);

  const std::vector<Edge> tri = {{0, 1}, {1, 2}, {0, 2}};
  const Matrix t = degree_onehot(make_graph(3, tri, Matrix(3, 1)), 4);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 5; ++c) EXPECT_EQ(t(r, c), c == 2 ? 1.0 : 0.0);
  }
}

TEST(DegreeOnehot, RowsSumToExactlyOne) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_graph(15, 1, 0.3, rng);
    for (std::size_t threshold : {1u, 3u, 20u}) {
      const Matrix f = degree_onehot(g, threshold);
      for (std::size_t r = 0; r < f.rows(); ++r) {
        double s = 0.0;
        for (double v : f.row(r)) s += v;
        EXPECT_EQ(s, 1.0);
      }
    }
  }
}

TEST(NormalizeAdjacency, Examples) {
  const Graph single = make_graph(1, std::vector<Edge>{}, Matrix(1, 1));
  EXPECT_EQ(normalize_adjacency(*single.adjacency).to_dense(), Matrix::from_rows({{1.0}}));
  const Matrix p = normalize_adjacency(*path_graph(2).adjacency).to_dense();
  EXPECT_LE(max_abs_diff(p, Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})), 1e-15);
}

TEST(NormalizeAdjacency, MatchesDenseOracleAndIsSymmetric) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_graph(8, 1, 0.35, rng);
    const Matrix a = g.adjacency->to_dense();
    const SparseMatrix s = normalize_adjacency(*g.adjacency);
    EXPECT_TRUE(s.is_symmetric(1e-12));
    std::vector<double> deg(8, 1.0);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) deg[i] += a(i, j);
    const Matrix dense = s.to_dense();
    for (std::size_t i = 0; i < 8; ++i) {
      double row_sum = 0.0;
      for (std::size_t j = 0; j < 8; ++j) {
        const double expected = (a(i, j) + (i == j ? 1.0 : 0.0)) / std::sqrt(deg[i] * deg[j]);
        EXPECT_NEAR(dense(i, j), expected, 1e-15);
        row_sum += dense(i, j);
      }
      EXPECT_GT(row_sum, 0.0);
      EXPECT_LE(row_sum, std::sqrt(deg[i]) + 1e-12);
    }
  }
}

TEST(BatchGraphs, SingleGraphIsIdentical) {
  Rng rng(3);
  const Graph g = random_graph(6, 3, 0.4, rng);
  const GraphBatch b = batch_graphs(std::span<const Graph>(&g, 1));
  EXPECT_EQ(b.adjacency->to_dense(), g.adjacency->to_dense());
  EXPECT_EQ(b.features, g.features);
  EXPECT_EQ(b.offsets, (std::vector<std::size_t>{0, 6}));
}

TEST(BatchGraphs, TwoPathsAreBlockDiagonal) {
  const std::vector<Graph> gs = {path_graph(2), path_graph(2)};
  const GraphBatch b = batch_graphs(gs);
  EXPECT_EQ(b.adjacency->to_dense(),
            Matrix::from_rows({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}));
  EXPECT_EQ(b.membership, (std::vector<std::size_t>{0, 0, 1, 1}));
}

TEST(BatchGraphs, MixedFeatureDimsThrow) {
  const std::vector<Graph> gs = {path_graph(2, 1), path_graph(2, 2)};
  EXPECT_THROW(batch_graphs(gs), std::invalid_argument);
}

TEST(BatchGraphs, BatchInvariantsHold) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Graph> gs;
    std::uniform_int_distribution<std::size_t> size(1, 9);
    for (int i = 0; i < 5; ++i) gs.push_back(random_graph(size(rng), 2, 0.4, rng));
    const GraphBatch b = batch_graphs(gs);
    std::size_t total = 0;
    for (std::size_t i = 0; i < b.num_graphs(); ++i) total += b.graph_size(i);
    EXPECT_EQ(total, b.num_nodes());
    EXPECT_TRUE(std::is_sorted(b.membership.begin(), b.membership.end()));
    for (std::size_t r = 0; r < b.adjacency->rows(); ++r)
      for (std::size_t c : b.adjacency->row_cols(r)) EXPECT_EQ(b.membership[r], b.membership[c]);
  }
}

class BatchedForward : public ::testing::TestWithParam<EncoderKind> {};

TEST_P(BatchedForward, EqualsPerGraphForwardsExactly) {
  DeterministicScope det(true);
  Rng rng(5);
  std::vector<Graph> gs;
  for (std::size_t n : {3u, 7u, 1u, 5u}) gs.push_back(random_graph(n, 4, 0.5, rng));
  EncoderConfig cfg;
  cfg.kind = GetParam();
  cfg.input_dim = 4;
  cfg.hidden_dim = 8;
  cfg.num_layers = 3;
  Encoder enc = make_encoder(cfg, rng);
  for (auto& layer : enc.layers) {
    for (auto* bn : {&layer.bn_inner, &layer.bn_out}) {
      if (!*bn) continue;
      for (double& m : (*bn)->running_mean) m = std::uniform_real_distribution<double>(-1, 1)(rng);
      for (double& v : (*bn)->running_var) v = std::uniform_real_distribution<double>(0.5, 2)(rng);
    }
  }
  NoGradGuard guard;
  const GraphBatch b = batch_graphs(gs);
  const auto batched = encode(b, enc, Mode::eval);
  std::size_t row = 0;
  for (const Graph& g : gs) {
    const GraphBatch single = batch_graphs(std::span<const Graph>(&g, 1));
    const auto per = encode(single, enc, Mode::eval);
    for (std::size_t l = 0; l < per.size(); ++l) {
      for (std::size_t r = 0; r < g.num_nodes(); ++r)
        for (std::size_t c = 0; c < per[l].cols(); ++c)
          EXPECT_EQ(batched[l].value()(row + r, c), per[l].value()(r, c));
    }
    row += g.num_nodes();
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, BatchedForward, ::testing::Values(EncoderKind::gcn, EncoderKind::gin));

TEST(SampleNodeSubset, FullSizeIsIsomorphic) {
  Rng rng(6);
  const Graph g = random_graph(10, 2, 0.3, rng);
  std::vector<std::size_t> kept;
  const Graph s = sample_node_subset(g, 10, rng, &kept);
  EXPECT_EQ(s.num_edges(), g.num_edges());
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(s.adjacency->at(i, j), g.adjacency->at(kept[i], kept[j]));
}

TEST(SampleNodeSubset, TriangleTwoNodesKeepsEdge) {
  Rng rng(7);
  const std::vector<Edge> tri = {{0, 1}, {1, 2}, {0, 2}};
  const Graph g = make_graph(3, tri, Matrix(3, 1));
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_node_subset(g, 2, rng).num_edges(), 1u);
}

TEST(SampleNodeSubset, StarWithoutCenterIsEdgeless) {
  Rng rng(8);
  const Graph star = star_graph(9);
  int seen = 0;
  for (int i = 0; i < 200; ++i) {
    std::vector<std::size_t> kept;
    const Graph s = sample_node_subset(star, 2, rng, &kept);
    if (std::find(kept.begin(), kept.end(), 0u) == kept.end()) {
      EXPECT_EQ(s.num_edges(), 0u);
      ++seen;
    }
  }
  EXPECT_GT(seen, 0);
}

TEST(SampleNodeSubset, OutOfRangeThrows) {
  Rng rng(9);
  const Graph g = path_graph(4);
  EXPECT_THROW(sample_node_subset(g, 0, rng), std::invalid_argument);
  EXPECT_THROW(sample_node_subset(g, 5, rng), std::invalid_argument);
}

TEST(SampleNodeSubset, NeverCreatesEdges) {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = random_graph(20, 3, 0.2, rng);
    std::vector<std::size_t> kept;
    const Graph s = sample_node_subset(g, 1 + trial % 20, rng, &kept);
    std::set<std::size_t> distinct(kept.begin(), kept.end());
    EXPECT_EQ(distinct.size(), kept.size());
    for (const auto& [u, v] : s.edges()) EXPECT_EQ(g.adjacency->at(kept[u], kept[v]), 1.0);
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(s.features(i, c), g.features(kept[i], c));
    expect_graph_invariants(s);
  }
}

TEST(ParseNodelevel, PathExample) {
  TempDir dir("node3");
  write_file(dir.path() / "edges.tsv", "0\t1\n1\t2\n");
  write_file(dir.path() / "features.csv", "1,0\n0,1\n1,1\n");
  write_file(dir.path() / "labels.txt", "0\n1\n0\n");
  write_file(dir.path() / "split.txt", "train 0\nvalid 1\ntest 2\n");
  const NodeDataset ds = parse_nodelevel_dir(dir.path());
  EXPECT_EQ(ds.graph.num_nodes(), 3u);
  EXPECT_EQ(ds.graph.feature_dim(), 2u);
  EXPECT_EQ(ds.graph.num_edges(), 2u);
  EXPECT_EQ(ds.graph.node_labels, (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_EQ(ds.split.test, std::vector<std::size_t>{2});
}

TEST(ParseNodelevel, ShortLabelFileIsRejected) {
  TempDir dir("nodeshort");
  write_file(dir.path() / "edges.tsv", "0\t1\n1\t2\n");
  write_file(dir.path() / "features.csv", "1,0\n0,1\n1,1\n");
  write_file(dir.path() / "labels.txt", "0\n1\n");
  write_file(dir.path() / "split.txt", "train 0\nvalid 1\ntest 2\n");
  EXPECT_THROW(parse_nodelevel_dir(dir.path()), DatasetError);
}

TEST(ParseNodelevel, SbmRoundTripsLosslessly) {
  SbmOptions opt;
  opt.num_nodes = 200;
  opt.p_in = 0.05;
  opt.p_out = 0.01;
  opt.seed = 11;
  const NodeDataset a = generate_sbm(opt);
  TempDir dir("sbmrt");
  write_nodelevel(a, dir.path());
  const NodeDataset b = parse_nodelevel_dir(dir.path());
  EXPECT_EQ(a.graph.adjacency->to_dense(), b.graph.adjacency->to_dense());
  EXPECT_EQ(a.graph.features, b.graph.features);
  EXPECT_EQ(a.graph.node_labels, b.graph.node_labels);
  EXPECT_EQ(a.split.train, b.split.train);
  EXPECT_EQ(a.split.valid, b.split.valid);
  EXPECT_EQ(a.split.test, b.split.test);
  EXPECT_EQ(a.num_classes, b.num_classes);
  expect_graph_invariants(b.graph);
}

TEST(GenerateSbm, BlockStructureAndSplit) {
  SbmOptions opt;
  opt.num_nodes = 400;
  opt.p_in = 0.1;
  opt.p_out = 0.01;
  opt.seed = 12;
  const NodeDataset ds = generate_sbm(opt);
  std::size_t within = 0, across = 0;
  for (const auto& [u, v] : ds.graph.edges())
    (ds.graph.node_labels[u] == ds.graph.node_labels[v] ? within : across)++;
  EXPECT_GT(within, 3 * across);
  EXPECT_EQ(ds.split.train.size() + ds.split.valid.size() + ds.split.test.size(), 400u);
  std::set<std::size_t> all;
  for (const auto* part : {&ds.split.train, &ds.split.valid, &ds.split.test}) all.insert(part->begin(), part->end());
  EXPECT_EQ(all.size(), 400u);
}

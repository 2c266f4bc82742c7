#include "lagraph/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace lagraph {

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  return in;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.filename().string() + ":" + std::to_string(line);
}

std::vector<std::string_view> split_tokens(std::string_view line, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && seps.find(line[i]) != std::string_view::npos) ++i;
    std::size_t j = i;
    while (j < line.size() && seps.find(line[j]) == std::string_view::npos) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long long parse_int(std::string_view tok, const fs::path& path, std::size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw DatasetError(where(path, line) + ": expected an integer, got '" + std::string(tok) + "'");
  }
  return v;
}

double parse_double(std::string_view tok, const fs::path& path, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw DatasetError(where(path, line) + ": expected a number, got '" + std::string(tok) + "'");
  }
  return v;
}

/// One integer per non-empty line.
std::vector<long long> read_int_column(const fs::path& path) {
  auto in = open_input(path);
  std::vector<long long> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto toks = split_tokens(line, " \t\r,");
    if (toks.empty()) continue;
    if (toks.size() != 1) throw DatasetError(where(path, n) + ": expected one integer per line");
    out.push_back(parse_int(toks[0], path, n));
  }
  return out;
}

}  // namespace

GraphDataset parse_tudataset(const fs::path& directory, const std::string& name,
                             std::optional<std::size_t> degree_threshold) {
  const fs::path a_file = directory / (name + "_A.txt");
  const fs::path ind_file = directory / (name + "_graph_indicator.txt");
  const fs::path gl_file = directory / (name + "_graph_labels.txt");
  const fs::path nl_file = directory / (name + "_node_labels.txt");
  for (const auto& f : {a_file, ind_file, gl_file}) {
    if (!fs::exists(f)) throw DatasetError("missing mandatory file " + f.string());
  }

  const auto indicator = read_int_column(ind_file);
  const auto raw_graph_labels = read_int_column(gl_file);
  const std::size_t num_graphs = raw_graph_labels.size();
  const std::size_t total_nodes = indicator.size();
  if (num_graphs == 0) throw DatasetError(gl_file.string() + " is empty");

  // Node ids are 1-indexed and must be grouped by graph.
  std::vector<std::size_t> graph_of(total_nodes), local(total_nodes);
  std::vector<std::size_t> sizes(num_graphs, 0);
  for (std::size_t v = 0; v < total_nodes; ++v) {
    const long long gi = indicator[v];
    if (gi < 1 || static_cast<std::size_t>(gi) > num_graphs) {
      throw DatasetError(where(ind_file, v + 1) + ": graph id " + std::to_string(gi) +
                         " outside [1, " + std::to_string(num_graphs) + "]");
    }
    graph_of[v] = static_cast<std::size_t>(gi - 1);
    local[v] = sizes[graph_of[v]]++;
  }
  for (std::size_t g = 0; g < num_graphs; ++g) {
    if (sizes[g] == 0) throw DatasetError("graph " + std::to_string(g + 1) + " has no nodes");
  }

  std::vector<std::vector<Edge>> edges(num_graphs);
  {
    auto in = open_input(a_file);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      auto toks = split_tokens(line, " \t\r,");
      if (toks.empty()) continue;
      if (toks.size() != 2) throw DatasetError(where(a_file, n) + ": expected 'u, v'");
      const long long u = parse_int(toks[0], a_file, n);
      const long long v = parse_int(toks[1], a_file, n);
      for (long long x : {u, v}) {
        if (x < 1 || static_cast<std::size_t>(x) > total_nodes) {
          throw DatasetError(where(a_file, n) + ": node " + std::to_string(x) +
                             " outside [1, " + std::to_string(total_nodes) + "]");
        }
      }
      const std::size_t gu = graph_of[u - 1], gv = graph_of[v - 1];
      if (gu != gv) {
        throw DatasetError(where(a_file, n) + ": edge (" + std::to_string(u) + ", " +
                           std::to_string(v) + ") crosses graphs " + std::to_string(gu + 1) +
                           " and " + std::to_string(gv + 1));
      }
      edges[gu].emplace_back(local[u - 1], local[v - 1]);
    }
  }

  std::map<long long, std::size_t> label_ids;
  for (long long l : raw_graph_labels) label_ids.emplace(l, 0);
  {
    std::size_t next = 0;
    for (auto& [raw, id] : label_ids) id = next++;
  }

  std::vector<long long> node_labels;
  std::map<long long, std::size_t> node_label_ids;
  const bool has_node_labels = fs::exists(nl_file);
  if (has_node_labels) {
    node_labels = read_int_column(nl_file);
    if (node_labels.size() != total_nodes) {
      throw DatasetError(nl_file.string() + " has " + std::to_string(node_labels.size()) +
                         " rows, expected " + std::to_string(total_nodes));
    }
    for (long long l : node_labels) node_label_ids.emplace(l, 0);
    std::size_t next = 0;
    for (auto& [raw, id] : node_label_ids) id = next++;
  }
  const std::size_t d = has_node_labels ? node_label_ids.size() : 1;

  GraphDataset ds;
  ds.name = name;
  ds.num_classes = label_ids.size();
  ds.feature_dim = d;
  ds.graphs.reserve(num_graphs);
  std::vector<Matrix> features;
  features.reserve(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) features.emplace_back(sizes[g], d);
  for (std::size_t v = 0; v < total_nodes; ++v) {
    const std::size_t col = has_node_labels ? node_label_ids.at(node_labels[v]) : 0;
    features[graph_of[v]](local[v], col) = 1.0;
  }
  for (std::size_t g = 0; g < num_graphs; ++g) {
    ds.graphs.push_back(
        make_graph(sizes[g], edges[g], std::move(features[g]), label_ids.at(raw_graph_labels[g])));
  }

  if (!has_node_labels) {
    std::size_t threshold = degree_threshold.value_or(0);
    if (!degree_threshold) {
      for (const auto& g : ds.graphs)
        for (std::size_t deg : g.degrees()) threshold = std::max(threshold, deg);
      threshold = std::max<std::size_t>(threshold, 1);
    }
    apply_degree_features(ds, threshold);
  }
  ds.validate();
  return ds;
}

void apply_degree_features(GraphDataset& dataset, std::size_t threshold) {
  for (auto& g : dataset.graphs) g.features = degree_onehot(g, threshold);
  dataset.feature_dim = threshold + 1;
}

NodeDataset parse_nodelevel(const fs::path& edge_file, const fs::path& feature_file,
                            const fs::path& label_file, const fs::path& split_file) {
  Matrix features;
  {
    auto in = open_input(feature_file);
    std::vector<double> data;
    std::size_t cols = 0, rows = 0, n = 0;
    std::string line;
    while (std::getline(in, line)) {
      ++n;
      auto toks = split_tokens(line, ",\r");
      if (toks.empty()) continue;
      if (rows == 0) cols = toks.size();
      if (toks.size() != cols) {
        throw DatasetError(where(feature_file, n) + ": expected " + std::to_string(cols) +
                           " columns, got " + std::to_string(toks.size()));
      }
      for (auto t : toks) data.push_back(parse_double(t, feature_file, n));
      ++rows;
    }
    features = Matrix(rows, cols, std::move(data));
  }
  const std::size_t num_nodes = features.rows();
  if (num_nodes == 0) throw DatasetError(feature_file.string() + " has no rows");

  const auto raw_labels = read_int_column(label_file);
  if (raw_labels.size() != num_nodes) {
    throw DatasetError(label_file.string() + " has " + std::to_string(raw_labels.size()) +
                       " labels for " + std::to_string(num_nodes) + " nodes");
  }

  std::vector<Edge> edges;
  {
    auto in = open_input(edge_file);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      auto toks = split_tokens(line, " \t\r");
      if (toks.empty()) continue;
      if (toks.size() != 2) throw DatasetError(where(edge_file, n) + ": expected 'u<TAB>v'");
      const long long u = parse_int(toks[0], edge_file, n);
      const long long v = parse_int(toks[1], edge_file, n);
      for (long long x : {u, v}) {
        if (x < 0 || static_cast<std::size_t>(x) >= num_nodes) {
          throw DatasetError(where(edge_file, n) + ": node " + std::to_string(x) +
                             " outside [0, " + std::to_string(num_nodes) + ")");
        }
      }
      edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    }
  }

  NodeDataset ds;
  ds.graph = make_graph(num_nodes, edges, std::move(features));
  ds.graph.node_labels.reserve(num_nodes);
  std::size_t max_label = 0;
  for (std::size_t v = 0; v < num_nodes; ++v) {
    if (raw_labels[v] < 0) throw DatasetError(where(label_file, v + 1) + ": negative label");
    ds.graph.node_labels.push_back(static_cast<std::size_t>(raw_labels[v]));
    max_label = std::max(max_label, ds.graph.node_labels.back());
  }
  ds.num_classes = max_label + 1;

  {
    auto in = open_input(split_file);
    std::string line;
    std::size_t n = 0;
    bool seen[3] = {false, false, false};
    while (std::getline(in, line)) {
      ++n;
      auto toks = split_tokens(line, " \t\r");
      if (toks.empty()) continue;
      std::vector<std::size_t>* target = nullptr;
      int slot = -1;
      if (toks[0] == "train") target = &ds.split.train, slot = 0;
      else if (toks[0] == "valid") target = &ds.split.valid, slot = 1;
      else if (toks[0] == "test") target = &ds.split.test, slot = 2;
      else throw DatasetError(where(split_file, n) + ": unknown split '" + std::string(toks[0]) + "'");
      if (seen[slot]) throw DatasetError(where(split_file, n) + ": repeated split line");
      seen[slot] = true;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const long long id = parse_int(toks[i], split_file, n);
        if (id < 0 || static_cast<std::size_t>(id) >= num_nodes) {
          throw DatasetError(where(split_file, n) + ": node " + std::to_string(id) +
                             " outside [0, " + std::to_string(num_nodes) + ")");
        }
        target->push_back(static_cast<std::size_t>(id));
      }
    }
    if (!seen[0] || !seen[2]) throw DatasetError(split_file.string() + " needs train and test lines");
  }
  ds.name = edge_file.parent_path().filename().string();
  validate_graph(ds.graph);
  return ds;
}

NodeDataset parse_nodelevel_dir(const fs::path& directory) {
  if (!fs::is_directory(directory)) throw DatasetError(directory.string() + " is not a directory");
  NodeDataset ds = parse_nodelevel(directory / "edges.tsv", directory / "features.csv",
                                   directory / "labels.txt", directory / "split.txt");
  ds.name = fs::absolute(directory).lexically_normal().filename().string();
  if (ds.name.empty()) ds.name = fs::absolute(directory).parent_path().filename().string();
  return ds;
}

void write_nodelevel(const NodeDataset& dataset, const fs::path& directory) {
  const Graph& g = dataset.graph;
  if (g.node_labels.size() != g.num_nodes()) {
    throw DatasetError("write_nodelevel: every node needs a label");
  }
  fs::create_directories(directory);
  auto open_out = [&](const char* file) {
    std::ofstream out(directory / file);
    if (!out) throw DatasetError("cannot write " + (directory / file).string());
    return out;
  };
  {
    auto out = open_out("edges.tsv");
    for (auto [u, v] : g.edges()) out << u << '\t' << v << '\n';
  }
  {
    auto out = open_out("features.csv");
    char buf[32];
    for (std::size_t r = 0; r < g.num_nodes(); ++r) {
      auto row = g.features.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        // Shortest representation that round-trips exactly.
        auto res = std::to_chars(buf, buf + sizeof buf, row[c]);
        if (c) out << ',';
        out.write(buf, res.ptr - buf);
      }
      out << '\n';
    }
  }
  {
    auto out = open_out("labels.txt");
    for (std::size_t l : g.node_labels) out << l << '\n';
  }
  {
    auto out = open_out("split.txt");
    auto line = [&](const char* tag, const std::vector<std::size_t>& ids) {
      out << tag;
      for (std::size_t i : ids) out << ' ' << i;
      out << '\n';
    };
    line("train", dataset.split.train);
    line("valid", dataset.split.valid);
    line("test", dataset.split.test);
  }
}

namespace {

std::size_t geometric_skip(double p, Rng& rng) {
  if (p >= 1.0) return 0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = u(rng);
  return static_cast<std::size_t>(std::floor(std::log1p(-r) / std::log1p(-p)));
}

}  // namespace

std::vector<Edge> erdos_renyi_edges(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability outside [0, 1]");
  std::vector<Edge> out;
  if (p == 0.0 || n < 2) return out;
  // Skip over the lower triangle (v > w) with geometric gaps.
  std::size_t v = 1, w = 0;
  w += geometric_skip(p, rng);
  while (v < n) {
    while (w >= v && v < n) {
      w -= v;
      ++v;
    }
    if (v >= n) break;
    out.emplace_back(w, v);
    w += 1 + geometric_skip(p, rng);
  }
  return out;
}

NodeDataset generate_sbm(const SbmOptions& o) {
  if (o.blocks < 1 || o.num_nodes < o.blocks) throw std::invalid_argument("sbm: need num_nodes >= blocks >= 1");
  if (o.feature_dim < 1) throw std::invalid_argument("sbm: feature_dim must be positive");
  if (o.train_fraction <= 0 || o.valid_fraction < 0 || o.train_fraction + o.valid_fraction >= 1) {
    throw std::invalid_argument("sbm: split fractions must leave a non-empty test set");
  }
  Rng rng(o.seed);
  const std::size_t n = o.num_nodes;
  std::vector<std::size_t> block(n);
  std::vector<std::size_t> start(o.blocks + 1);
  for (std::size_t b = 0; b <= o.blocks; ++b) start[b] = b * n / o.blocks;
  for (std::size_t b = 0; b < o.blocks; ++b)
    for (std::size_t v = start[b]; v < start[b + 1]; ++v) block[v] = b;

  std::vector<Edge> edges;
  for (std::size_t b = 0; b < o.blocks; ++b) {
    const std::size_t off = start[b];
    for (auto [u, v] : erdos_renyi_edges(start[b + 1] - off, o.p_in, rng))
      edges.emplace_back(u + off, v + off);
  }
  for (std::size_t a = 0; a < o.blocks; ++a) {
    for (std::size_t b = a + 1; b < o.blocks; ++b) {
      const std::size_t na = start[a + 1] - start[a], nb = start[b + 1] - start[b];
      const std::size_t total = na * nb;
      if (o.p_out <= 0.0) continue;
      std::size_t k = geometric_skip(o.p_out, rng);
      while (k < total) {
        edges.emplace_back(start[a] + k / nb, start[b] + k % nb);
        k += 1 + geometric_skip(o.p_out, rng);
      }
    }
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix means(o.blocks, o.feature_dim);
  std::bernoulli_distribution coin(0.5);
  for (double& m : means.data()) m = coin(rng) ? o.mean_scale : -o.mean_scale;
  Matrix features(n, o.feature_dim);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t c = 0; c < o.feature_dim; ++c)
      features(v, c) = means(block[v], c) + o.noise_sd * normal(rng);

  NodeDataset ds;
  ds.graph = make_graph(n, edges, std::move(features));
  ds.graph.node_labels = block;
  ds.num_classes = o.blocks;
  ds.name = "sbm";

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(o.train_fraction * n));
  const auto n_valid = static_cast<std::size_t>(std::llround(o.valid_fraction * n));
  ds.split.train.assign(perm.begin(), perm.begin() + n_train);
  ds.split.valid.assign(perm.begin() + n_train, perm.begin() + n_train + n_valid);
  ds.split.test.assign(perm.begin() + n_train + n_valid, perm.end());
  for (auto* s : {&ds.split.train, &ds.split.valid, &ds.split.test}) std::sort(s->begin(), s->end());
  return ds;
}

}  // namespace lagraph

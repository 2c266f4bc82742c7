#include "ablation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "commands.hpp"
#include "lagraph/protocol.hpp"

namespace lagraph::cli {

using nlohmann::json;

namespace {

json config_json(const TrainConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : config_items(c)) j[k] = v;
  return j;
}

void require_level(const AblationOptions& a, Level level) {
  if (a.config.level != level) {
    throw UsageError("study '" + a.study + "' needs a " + to_string(level) + "-level config");
  }
  const bool node = is_node_dataset(a.dataset);
  if (level == Level::node && !node) {
    throw UsageError("study '" + a.study + "' needs a node dataset directory, got " + a.dataset.string());
  }
  if (level == Level::graph && node) {
    throw UsageError("study '" + a.study + "' needs a TUDataset directory, got " + a.dataset.string());
  }
}

json graph_info(const GraphDataset& ds, const AblationOptions& a) {
  return {{"name", ds.name}, {"path", a.dataset.string()}, {"kind", "tudataset"}, {"graphs", ds.size()}};
}

json node_info(const NodeDataset& ds, const AblationOptions& a) {
  return {{"name", ds.name}, {"path", a.dataset.string()}, {"kind", "node"},
          {"nodes", ds.graph.num_nodes()}};
}

ProtocolOptions protocol_options(const AblationOptions& a) {
  ProtocolOptions p;
  p.seeds = a.seeds;
  p.folds = a.folds;
  p.eval_seed = a.eval_seed;
  return p;
}

json batch_size_study(const AblationOptions& a, json& doc) {
  require_level(a, Level::graph);
  const GraphDataset ds = load_graph_dataset(a.dataset, a.config.degree_threshold);
  doc["dataset"] = graph_info(ds, a);
  const auto sizes = a.sizes.empty() ? default_batch_sizes() : a.sizes;
  json means = json::object();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<double> values;
  for (std::size_t b : sizes) {
    TrainConfig c = a.config;
    c.batch_size = b;
    const RunSummary s = graph_protocol(ds, c, protocol_options(a));
    doc["cells"].push_back({{"setting", {{"batch_size", b}}}, {"report", s.to_json()}});
    means[std::to_string(b)] = s.mean;
    values.push_back(s.mean);
    lo = std::min(lo, s.mean);
    hi = std::max(hi, s.mean);
  }
  json diffs = json::object();
  double worst = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    diffs[std::to_string(sizes[i])] = values[i] - values.back();
    worst = std::max(worst, std::abs(values[i] - values.back()));
  }
  return {{"means", means}, {"max_minus_min", hi - lo}, {"reference_batch_size", sizes.back()},
          {"diff_to_reference", diffs}, {"max_abs_diff_to_reference", worst}};
}

json subgraph_study(const AblationOptions& a, json& doc) {
  require_level(a, Level::node);
  const NodeDataset ds = parse_nodelevel_dir(a.dataset);
  doc["dataset"] = node_info(ds, a);
  const auto sizes = a.sizes.empty() ? default_subgraph_sizes(ds.graph.num_nodes()) : a.sizes;
  json means = json::object();
  std::vector<std::pair<std::string, double>> values;
  for (std::size_t n : sizes) {
    TrainConfig c = a.config;
    c.subgraph_nodes = n >= ds.graph.num_nodes() ? 0 : n;
    const RunSummary s = node_protocol(ds, c, protocol_options(a));
    const std::string key = c.subgraph_nodes == 0 ? "all" : std::to_string(n);
    doc["cells"].push_back({{"setting", {{"subgraph_nodes", key}}}, {"report", s.to_json()}});
    means[key] = s.mean;
    values.emplace_back(key, s.mean);
  }
  json summary = {{"means", means}};
  if (means.contains("all")) {
    const double full = means["all"].get<double>();
    json diffs = json::object();
    for (const auto& [k, v] : values) diffs[k] = v - full;
    summary["diff_to_full"] = diffs;
    summary["collapse_gap"] = full - values.front().second;
    summary["smallest_setting"] = values.front().first;
  }
  return summary;
}

json objective_study(const AblationOptions& a, json& doc) {
  const bool node = a.config.level == Level::node;
  require_level(a, a.config.level);
  const std::vector<Variant> variants = {Variant::mse_embed, Variant::mse_output, Variant::ce_embed,
                                         Variant::ce_output};
  NodeDataset nd;
  GraphDataset gd;
  if (node) {
    nd = parse_nodelevel_dir(a.dataset);
    gd = as_graph_dataset(nd);
    doc["dataset"] = node_info(nd, a);
  } else {
    gd = load_graph_dataset(a.dataset, a.config.degree_threshold);
    doc["dataset"] = graph_info(gd, a);
  }
  for (Variant v : variants) {
    TrainConfig c = a.config;
    c.variant = v;
    check_compatible(gd, c);
  }
  json means = json::object();
  std::string best;
  double best_mean = -1.0;
  for (Variant v : variants) {
    TrainConfig c = a.config;
    c.variant = v;
    const RunSummary s = node ? node_protocol(nd, c, protocol_options(a))
                              : graph_protocol(gd, c, protocol_options(a));
    doc["cells"].push_back({{"setting", {{"variant", to_string(v)}}}, {"report", s.to_json()}});
    means[to_string(v)] = s.mean;
    if (s.mean > best_mean) best_mean = s.mean, best = to_string(v);
  }
  return {{"means", means}, {"best_variant", best},
          {"mse_embed_gap", best_mean - means[to_string(Variant::mse_embed)].get<double>()}};
}

json concat_study(const AblationOptions& a, json& doc) {
  require_level(a, Level::node);
  const NodeDataset ds = parse_nodelevel_dir(a.dataset);
  doc["dataset"] = node_info(ds, a);
  std::vector<EvalReport> with, without;
  ProtocolOptions p = protocol_options(a);
  for (std::size_t r = 0; r < a.seeds; ++r) {
    TrainConfig c = a.config;
    c.seed = a.config.seed + r;
    TrainResult trained = train(as_graph_dataset(ds), c);
    p.concat_raw = true;
    with.push_back(node_linear_eval(ds, trained.model.encoder, p));
    p.concat_raw = false;
    without.push_back(node_linear_eval(ds, trained.model.encoder, p));
  }
  const RunSummary sw = summarize_runs(std::move(with)), so = summarize_runs(std::move(without));
  doc["cells"].push_back({{"setting", {{"concat_raw", true}}}, {"report", sw.to_json()}});
  doc["cells"].push_back({{"setting", {{"concat_raw", false}}}, {"report", so.to_json()}});
  return {{"means", {{"with_concat", sw.mean}, {"without_concat", so.mean}}},
          {"concat_gain", sw.mean - so.mean}};
}

}  // namespace

std::vector<std::size_t> default_batch_sizes() { return {8, 32, 128, 256}; }

std::vector<std::size_t> default_subgraph_sizes(std::size_t num_nodes) {
  std::vector<std::size_t> out;
  for (std::size_t n = 10; n < num_nodes; n *= 10) out.push_back(n);
  out.push_back(0);
  return out;
}

json run_ablation(const AblationOptions& a) {
  json doc = {{"study", a.study}, {"config", config_json(a.config)}, {"cells", json::array()},
              {"seeds", a.seeds}};
  if (a.study == "batch-size") {
    doc["summary"] = batch_size_study(a, doc);
  } else if (a.study == "subgraph") {
    doc["summary"] = subgraph_study(a, doc);
  } else if (a.study == "objective") {
    doc["summary"] = objective_study(a, doc);
  } else if (a.study == "concat") {
    doc["summary"] = concat_study(a, doc);
  } else {
    throw UsageError("unknown study '" + a.study + "' (expected batch-size|subgraph|objective|concat)");
  }
  doc["summary"]["study"] = a.study;
  return doc;
}

}  // namespace lagraph::cli

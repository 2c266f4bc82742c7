#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include "ablation.hpp"
#include "lagraph/bounds.hpp"
#include "lagraph/checkpoint.hpp"
#include "lagraph/evaluation.hpp"
#include "lagraph/execution.hpp"
#include "lagraph/protocol.hpp"
#include "lagraph/training.hpp"
#include "output_dir.hpp"

namespace lagraph::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class T>
T get_or(const Options& o, const char* key, T fallback) {
  return o.contains(key) && !o.at(key).is_null() ? o.at(key).get<T>() : fallback;
}

std::string require_string(const Options& o, const char* key) {
  if (!o.contains(key) || !o.at(key).is_string() || o.at(key).get<std::string>().empty()) {
    throw UsageError(std::string("missing required option --") + key);
  }
  return o.at(key).get<std::string>();
}

json config_json(const TrainConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : config_items(c)) j[k] = v;
  return j;
}

json manifest(const std::string& command, const Options& resolved, const json& dataset,
              std::uint64_t seed, double seconds, const OutputDir& dir) {
  std::vector<std::string> outputs = dir.files();
  outputs.push_back((dir.root() / "manifest.json").string());
  return {{"command", command},
          {"options", resolved},
          {"dataset", dataset},
          {"seed", seed},
          {"wall_clock_seconds", seconds},
          {"outputs", outputs},
          {"version", LAGRAPH_VERSION},
          {"deterministic", deterministic_mode()}};
}

json dataset_info(const fs::path& path, const GraphDataset& ds) {
  std::size_t nodes = 0;
  for (const auto& g : ds.graphs) nodes += g.num_nodes();
  return {{"name", ds.name}, {"path", path.string()}, {"kind", "tudataset"},
          {"graphs", ds.size()}, {"nodes", nodes}, {"feature_dim", ds.feature_dim},
          {"num_classes", ds.num_classes}};
}

json dataset_info(const fs::path& path, const NodeDataset& ds) {
  return {{"name", ds.name}, {"path", path.string()}, {"kind", "node"},
          {"graphs", 1}, {"nodes", ds.graph.num_nodes()}, {"feature_dim", ds.graph.feature_dim()},
          {"num_classes", ds.num_classes}};
}

json step_json(const StepRecord& s) {
  return {{"epoch", s.epoch},
          {"step", s.step},
          {"graphs", s.graphs},
          {"nodes", s.nodes},
          {"total", s.loss.total},
          {"reconstruction", s.loss.reconstruction},
          {"invariance", s.loss.invariance},
          {"alpha", s.loss.alpha},
          {"variant", to_string(s.loss.variant)},
          {"level", to_string(s.loss.level)}};
}

void require_dataset_kind(const fs::path& path, Level level) {
  if (!fs::exists(path)) throw DatasetError("dataset path " + path.string() + " does not exist");
  const bool node = is_node_dataset(path);
  if (level == Level::node && !node) {
    throw UsageError("node-level run needs a node dataset directory (edges.tsv, features.csv, "
                     "labels.txt, split.txt); got " + path.string());
  }
  if (level == Level::graph && node) {
    throw UsageError("graph-level run needs a TUDataset directory; " + path.string() +
                     " holds a node dataset");
  }
}

}  // namespace

TrainConfig resolve_config(const Options& o) {
  TrainConfig c;
  if (o.contains("config") && o.at("config").is_object()) {
    const auto& items = o.at("config");
    c = default_config(parse_level(items.value("level", std::string("graph"))));
    for (const auto& [k, v] : items.items()) apply_setting(c, k, v.get<std::string>());
  } else if (o.contains("config_file") && o.at("config_file").is_string()) {
    c = load_config(o.at("config_file").get<std::string>());
  } else {
    c = default_config(parse_level(get_or<std::string>(o, "level", "graph")));
  }
  if (o.contains("level") && o.at("level").is_string() && parse_level(o.at("level").get<std::string>()) != c.level) {
    throw ConfigError("--level " + o.at("level").get<std::string>() + " contradicts the config level " +
                      to_string(c.level));
  }
  if (o.contains("overrides")) {
    const auto& over = o.at("overrides");
    if (over.is_object()) {
      for (const auto& [k, v] : over.items()) apply_setting(c, k, v.get<std::string>());
    } else {
      for (const auto& kv : over) apply_setting(c, kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    }
  }
  if (o.contains("seed") && !o.at("seed").is_null()) c.seed = o.at("seed").get<std::uint64_t>();
  validate(c);
  return c;
}

bool is_node_dataset(const fs::path& path) { return fs::exists(path / "edges.tsv"); }

std::string dataset_name(const fs::path& path) {
  fs::path p = path.lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  return p.filename().string();
}

GraphDataset load_graph_dataset(const fs::path& path, std::size_t degree_threshold) {
  return parse_tudataset(path, dataset_name(path),
                         degree_threshold > 0 ? std::optional<std::size_t>(degree_threshold) : std::nullopt);
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  const TrainConfig cfg = resolve_config(o);
  const fs::path data_path = require_string(o, "dataset");
  const std::string out_dir = require_string(o, "out");
  require_dataset_kind(data_path, cfg.level);

  GraphDataset ds;
  json info;
  if (cfg.level == Level::node) {
    NodeDataset nd = parse_nodelevel_dir(data_path);
    info = dataset_info(data_path, nd);
    ds = as_graph_dataset(nd);
  } else {
    ds = load_graph_dataset(data_path, cfg.degree_threshold);
    info = dataset_info(data_path, ds);
  }
  check_compatible(ds, cfg);

  OutputDir dir(out_dir);
  std::ofstream log(dir.file("loss.jsonl"), std::ios::binary | std::ios::trunc);
  if (!log) throw std::runtime_error("cannot write loss log in " + out_dir);
  TrainResult result = train(ds, cfg, [&](const StepRecord& s) { log << step_json(s).dump() << '\n'; });
  log.close();
  if (!log) throw std::runtime_error("failed writing loss log in " + out_dir);
  save_checkpoint({std::move(result.model), cfg, ds.feature_dim}, dir.file("checkpoint.json"));

  json resolved = {{"config", config_json(cfg)}, {"dataset", data_path.string()}, {"out", out_dir}};
  json m = manifest("train", resolved, info, cfg.seed, seconds_since(start), dir);
  const auto& last = result.epochs.back();
  m["final_epoch"] = {{"epoch", last.epoch}, {"total", last.total},
                      {"reconstruction", last.reconstruction}, {"invariance", last.invariance}};
  m["steps"] = result.steps.size();
  write_json(dir.root() / "manifest.json", m);
  dir.commit();
  out << json{{"command", "train"}, {"out", out_dir}, {"steps", result.steps.size()},
              {"final_epoch", m["final_epoch"]}}.dump()
      << '\n';
  return exit_ok;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  const fs::path ckpt_path = require_string(o, "checkpoint");
  const fs::path data_path = require_string(o, "dataset");
  const std::string out_dir = require_string(o, "out");
  const Level level = parse_level(require_string(o, "level"));
  const auto folds = get_or<std::size_t>(o, "folds", 10);
  const auto reps = get_or<std::size_t>(o, "reps", 5);
  const auto seed = get_or<std::uint64_t>(o, "seed", 0);
  const bool concat_raw = get_or<bool>(o, "concat_raw", true);
  if (folds < 2) throw UsageError("--folds must be at least 2");
  if (reps < 1) throw UsageError("--reps must be at least 1");

  Checkpoint ckpt = load_checkpoint(ckpt_path);
  require_level(ckpt, level);
  require_dataset_kind(data_path, level);
  const std::uint64_t checksum = model_checksum(ckpt.model.encoder);

  std::vector<EvalReport> runs;
  json info;
  if (level == Level::graph) {
    const GraphDataset ds = load_graph_dataset(data_path, ckpt.config.degree_threshold);
    info = dataset_info(data_path, ds);
    if (ds.feature_dim != ckpt.feature_dim) {
      throw ShapeError("dataset feature_dim " + std::to_string(ds.feature_dim) +
                       " does not match checkpoint feature_dim " + std::to_string(ckpt.feature_dim));
    }
    if (ds.size() < folds) throw UsageError("--folds exceeds the number of graphs");
    const Matrix reprs = extract_graph_repr(ds, ckpt.model.encoder);
    const auto grid = default_c_grid();
    for (std::size_t r = 0; r < reps; ++r) {
      runs.push_back(linsvm_kfold(reprs, ds.labels(), folds, grid, derive_seed(seed, r)));
    }
  } else {
    const NodeDataset ds = parse_nodelevel_dir(data_path);
    info = dataset_info(data_path, ds);
    if (ds.graph.feature_dim() != ckpt.feature_dim) {
      throw ShapeError("dataset feature_dim does not match the checkpoint");
    }
    ProtocolOptions po;
    po.concat_raw = concat_raw;
    po.logreg.lr = get_or<double>(o, "logreg_lr", 0.01);
    po.logreg.weight_decay = get_or<double>(o, "logreg_weight_decay", 0.0);
    po.logreg.epochs = get_or<std::size_t>(o, "logreg_epochs", 300);
    for (std::size_t r = 0; r < reps; ++r) {
      po.eval_seed = derive_seed(seed, r);
      runs.push_back(node_linear_eval(ds, ckpt.model.encoder, po));
    }
  }
  if (model_checksum(ckpt.model.encoder) != checksum) {
    throw std::logic_error("evaluation modified the encoder parameters");
  }
  json report = summarize_runs(std::move(runs)).to_json();
  report["level"] = to_string(level);
  report["checkpoint"] = ckpt_path.string();
  report["encoder_checksum"] = checksum;

  OutputDir dir(out_dir);
  write_json(dir.file("report.json"), report);
  Options resolved = {{"checkpoint", ckpt_path.string()}, {"dataset", data_path.string()},
                      {"level", to_string(level)}, {"folds", folds}, {"reps", reps},
                      {"seed", seed}, {"concat_raw", concat_raw}, {"out", out_dir}};
  for (const char* k : {"logreg_lr", "logreg_weight_decay", "logreg_epochs"}) {
    if (o.contains(k)) resolved[k] = o.at(k);
  }
  write_json(dir.root() / "manifest.json",
             manifest("eval", resolved, info, seed, seconds_since(start), dir));
  dir.commit();
  out << report.dump(2) << '\n';
  return exit_ok;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  VerifyOptions v;
  v.trials = get_or<std::size_t>(o, "trials", 100);
  v.seed = get_or<std::uint64_t>(o, "seed", 0);
  v.suite = get_or<std::string>(o, "suite", "all");
  v.mc.n_samples = get_or<std::size_t>(o, "samples", 512);
  v.mc.n_masks = get_or<std::size_t>(o, "masks", 8);
  v.mc.multiplier_scale = get_or<double>(o, "multiplier_scale", 1.0);
  const std::string out_dir = require_string(o, "out");
  if (v.trials < 1) throw UsageError("--trials must be at least 1");
  if (v.mc.n_samples < 2) throw UsageError("--samples must be at least 2");
  if (v.mc.n_masks < 1) throw UsageError("--masks must be at least 1");
  if (!std::isfinite(v.mc.multiplier_scale)) throw UsageError("--multiplier-scale must be finite");
  if (v.suite != "all" && v.suite != "theorem1" && v.suite != "corollaries" && v.suite != "dae") {
    throw UsageError("--suite must be one of theorem1|corollaries|dae|all");
  }

  const VerificationReport report = run_verification(v);
  json doc = report.to_json();
  doc["options"] = {{"trials", v.trials}, {"seed", v.seed}, {"suite", v.suite},
                    {"samples", v.mc.n_samples}, {"masks", v.mc.n_masks},
                    {"multiplier_scale", v.mc.multiplier_scale}};

  OutputDir dir(out_dir);
  write_json(dir.file("verify.json"), doc);
  Options resolved = doc["options"];
  resolved["out"] = out_dir;
  json m = manifest("verify", resolved, json{{"name", "synthetic"}, {"kind", "synthetic"}}, v.seed,
                    seconds_since(start), dir);
  m["passed"] = report.passed();
  write_json(dir.root() / "manifest.json", m);
  dir.commit();
  out << doc["summary"].dump() << '\n';
  return report.passed() ? exit_ok : exit_hard_failure;
}

int cmd_ablate(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  AblationOptions a;
  a.study = require_string(o, "study");
  a.config = resolve_config(o);
  a.dataset = require_string(o, "dataset");
  a.seeds = get_or<std::size_t>(o, "reps", 1);
  a.folds = get_or<std::size_t>(o, "folds", 10);
  a.eval_seed = get_or<std::uint64_t>(o, "eval_seed", 0);
  if (o.contains("sizes") && o.at("sizes").is_array()) a.sizes = o.at("sizes").get<std::vector<std::size_t>>();
  const std::string out_dir = require_string(o, "out");
  if (a.folds < 2) throw UsageError("--folds must be at least 2");
  if (a.seeds < 1) throw UsageError("--reps must be at least 1");

  const json doc = run_ablation(a);
  OutputDir dir(out_dir);
  write_json(dir.file("ablation.json"), doc);
  Options resolved = {{"study", a.study}, {"config", config_json(a.config)},
                      {"dataset", a.dataset.string()}, {"reps", a.seeds}, {"folds", a.folds},
                      {"eval_seed", a.eval_seed}, {"out", out_dir}};
  if (!a.sizes.empty()) resolved["sizes"] = a.sizes;
  write_json(dir.root() / "manifest.json",
             manifest("ablate", resolved, doc.at("dataset"), a.config.seed, seconds_since(start), dir));
  dir.commit();
  out << doc.at("summary").dump() << '\n';
  return exit_ok;
}

int cmd_gen_sbm(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  SbmOptions s;
  s.num_nodes = get_or<std::size_t>(o, "nodes", s.num_nodes);
  s.blocks = get_or<std::size_t>(o, "blocks", s.blocks);
  s.p_in = get_or<double>(o, "p_in", s.p_in);
  s.p_out = get_or<double>(o, "p_out", s.p_out);
  s.feature_dim = get_or<std::size_t>(o, "dim", s.feature_dim);
  s.mean_scale = get_or<double>(o, "mean_scale", s.mean_scale);
  s.noise_sd = get_or<double>(o, "noise_sd", s.noise_sd);
  s.seed = get_or<std::uint64_t>(o, "seed", 0);
  const std::string out_dir = require_string(o, "out");

  NodeDataset ds = generate_sbm(s);
  ds.name = dataset_name(out_dir);
  OutputDir dir(out_dir);
  for (const char* f : {"edges.tsv", "features.csv", "labels.txt", "split.txt"}) dir.file(f);
  write_nodelevel(ds, dir.root());
  Options resolved = {{"nodes", s.num_nodes}, {"blocks", s.blocks}, {"p_in", s.p_in},
                      {"p_out", s.p_out}, {"dim", s.feature_dim}, {"mean_scale", s.mean_scale},
                      {"noise_sd", s.noise_sd}, {"seed", s.seed}, {"out", out_dir}};
  write_json(dir.root() / "manifest.json",
             manifest("gen-sbm", resolved, dataset_info(out_dir, ds), s.seed, seconds_since(start), dir));
  dir.commit();
  out << json{{"command", "gen-sbm"}, {"out", out_dir}, {"nodes", ds.graph.num_nodes()},
              {"edges", ds.graph.num_edges()}}.dump()
      << '\n';
  return exit_ok;
}

int cmd_rerun(const fs::path& manifest_path, const std::optional<std::string>& out_dir,
              std::ostream& out) {
  const json m = read_json(manifest_path);
  if (!m.contains("command") || !m.contains("options")) {
    throw UsageError(manifest_path.string() + " is not a run manifest");
  }
  Options o = m.at("options");
  if (out_dir) o["out"] = *out_dir;
  return dispatch(m.at("command").get<std::string>(), o, out);
}

int dispatch(const std::string& command, const Options& o, std::ostream& out) {
  if (command == "train") return cmd_train(o, out);
  if (command == "eval") return cmd_eval(o, out);
  if (command == "verify") return cmd_verify(o, out);
  if (command == "ablate") return cmd_ablate(o, out);
  if (command == "gen-sbm") return cmd_gen_sbm(o, out);
  throw UsageError("unknown command '" + command + "'");
}

int run_guarded(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(command, o, out);
  } catch (const json::exception& e) {
    err << "error: malformed options: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_runtime;
  }
}

}  // namespace lagraph::cli

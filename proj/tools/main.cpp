#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lagraph/execution.hpp"

namespace {

using lagraph::cli::Options;

/// Config-override flags shared by train and ablate, keyed by config field.
struct Overrides {
  std::vector<std::pair<std::string, std::optional<std::string>>> flags = {
      {"epochs", {}},        {"batch_size", {}},     {"learning_rate", {}}, {"alpha", {}},
      {"mask_ratio", {}},    {"noise_sd", {}},       {"mask_mode", {}},     {"variant", {}},
      {"encoder", {}},       {"encoder_layers", {}}, {"hidden_dim", {}},    {"decoder", {}},
      {"decoder_layers", {}}, {"decoder_hidden", {}}, {"weight_decay", {}},  {"subgraph_nodes", {}},
      {"degree_threshold", {}}};
  std::vector<std::string> settings;
  std::optional<std::string> config_file;
  std::optional<std::string> level;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "Config file of key = value lines");
    app->add_option("--level", level, "graph or node (selects defaults without --config)");
    app->add_option("--seed", seed, "Training seed");
    for (auto& [key, value] : flags) {
      std::string flag = "--" + key;
      for (char& c : flag) if (c == '_') c = '-';
      app->add_option(flag, value, "Override config field " + key);
    }
    app->add_option("--set", settings, "Override any config field, key=value")->take_all();
  }

  void fill(Options& o) const {
    if (config_file) o["config_file"] = *config_file;
    if (level) o["level"] = *level;
    if (seed) o["seed"] = *seed;
    Options list = Options::array();
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got '" + s + "'");
      list.push_back({s.substr(0, eq), s.substr(eq + 1)});
    }
    for (const auto& [key, value] : flags) {
      if (value) list.push_back({key, *value});
    }
    o["overrides"] = list;
  }
};

template <class T>
void put(Options& o, const char* key, const std::optional<T>& v) {
  if (v) o[key] = *v;
}

}  // namespace

int main(int argc, char** argv) {
  lagraph::configure_allocator();
  CLI::App app{"lagraph: self-supervised graph representation learning toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(LAGRAPH_VERSION));

  std::string dataset, out, checkpoint, level = "graph", suite = "all", study, manifest;
  std::optional<std::string> rerun_out;
  std::size_t folds = 10, reps = 5, trials = 100, samples = 512, masks = 8, ablate_reps = 1;
  std::uint64_t seed = 0, eval_seed = 0;
  double multiplier_scale = 1.0;
  bool no_concat = false;
  std::optional<double> logreg_lr, logreg_wd;
  std::optional<std::size_t> logreg_epochs;
  std::vector<std::size_t> sizes;
  std::optional<std::size_t> nodes, blocks, dim;
  std::optional<double> p_in, p_out, mean_scale, noise_sd;

  Overrides train_over;
  auto* train = app.add_subcommand("train", "Self-supervised training; writes checkpoint, loss log, manifest");
  train->add_option("--dataset", dataset, "TUDataset or node dataset directory")->required();
  train->add_option("--out", out, "Output directory")->required();
  train_over.attach(train);

  auto* eval = app.add_subcommand("eval", "Linear evaluation of a checkpoint");
  eval->add_option("--checkpoint", checkpoint)->required();
  eval->add_option("--dataset", dataset)->required();
  eval->add_option("--level", level)->check(CLI::IsMember({"graph", "node"}));
  eval->add_option("--folds", folds, "SVM folds (graph level)");
  eval->add_option("--reps", reps, "Repetitions with distinct evaluation seeds");
  eval->add_option("--seed", seed, "Evaluation seed");
  eval->add_flag("--no-concat", no_concat, "Node level: omit raw features from the representation");
  eval->add_option("--logreg-lr", logreg_lr);
  eval->add_option("--logreg-weight-decay", logreg_wd);
  eval->add_option("--logreg-epochs", logreg_epochs);
  eval->add_option("--out", out)->required();

  auto* verify = app.add_subcommand("verify", "Monte-Carlo checks of the upper bounds on synthetic latent graphs");
  verify->add_option("--trials", trials);
  verify->add_option("--seed", seed);
  verify->add_option("--suite", suite)->check(CLI::IsMember({"theorem1", "corollaries", "dae", "all"}));
  verify->add_option("--samples", samples, "Data draws per estimate");
  verify->add_option("--masks", masks, "Mask subsets per estimate");
  verify->add_option("--multiplier-scale", multiplier_scale, "Test hook scaling every bound multiplier");
  verify->add_option("--out", out)->required();

  Overrides ablate_over;
  auto* ablate = app.add_subcommand("ablate", "Ablation sweep with one report per grid cell");
  ablate->add_option("--study", study)->required()->check(
      CLI::IsMember({"batch-size", "subgraph", "objective", "concat"}));
  ablate->add_option("--dataset", dataset)->required();
  ablate->add_option("--reps", ablate_reps, "Training seeds per cell");
  ablate->add_option("--folds", folds);
  ablate->add_option("--eval-seed", eval_seed);
  ablate->add_option("--sizes", sizes, "Grid override (batch sizes or subgraph node counts, 0 = all)");
  ablate->add_option("--out", out)->required();
  ablate_over.attach(ablate);

  auto* gen = app.add_subcommand("gen-sbm", "Write a synthetic stochastic-block-model node dataset");
  gen->add_option("--nodes", nodes);
  gen->add_option("--blocks", blocks);
  gen->add_option("--p-in", p_in);
  gen->add_option("--p-out", p_out);
  gen->add_option("--dim", dim);
  gen->add_option("--mean-scale", mean_scale);
  gen->add_option("--noise-sd", noise_sd);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out)->required();

  auto* rerun = app.add_subcommand("rerun", "Re-execute a run from its manifest");
  rerun->add_option("--manifest", manifest)->required();
  rerun->add_option("--out", rerun_out, "Write into this directory instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lagraph::cli::exit_usage;
  }

  Options o = Options::object();
  std::string command;
  try {
    if (*train) {
      command = "train";
      o = {{"dataset", dataset}, {"out", out}};
      train_over.fill(o);
    } else if (*eval) {
      command = "eval";
      o = {{"checkpoint", checkpoint}, {"dataset", dataset}, {"level", level}, {"folds", folds},
           {"reps", reps}, {"seed", seed}, {"concat_raw", !no_concat}, {"out", out}};
      put(o, "logreg_lr", logreg_lr);
      put(o, "logreg_weight_decay", logreg_wd);
      put(o, "logreg_epochs", logreg_epochs);
    } else if (*verify) {
      command = "verify";
      o = {{"trials", trials}, {"seed", seed}, {"suite", suite}, {"samples", samples},
           {"masks", masks}, {"multiplier_scale", multiplier_scale}, {"out", out}};
    } else if (*ablate) {
      command = "ablate";
      o = {{"study", study}, {"dataset", dataset}, {"reps", ablate_reps}, {"folds", folds},
           {"eval_seed", eval_seed}, {"out", out}};
      if (!sizes.empty()) o["sizes"] = sizes;
      ablate_over.fill(o);
    } else if (*gen) {
      command = "gen-sbm";
      o = {{"seed", seed}, {"out", out}};
      put(o, "nodes", nodes);
      put(o, "blocks", blocks);
      put(o, "p_in", p_in);
      put(o, "p_out", p_out);
      put(o, "dim", dim);
      put(o, "mean_scale", mean_scale);
      put(o, "noise_sd", noise_sd);
    } else if (*rerun) {
      try {
        return lagraph::cli::cmd_rerun(manifest, rerun_out, std::cout);
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lagraph::cli::exit_usage;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lagraph::cli::exit_runtime;
      }
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : lagraph::cli::exit_usage;
  }
  return lagraph::cli::run_guarded(command, o, std::cout, std::cerr);
}

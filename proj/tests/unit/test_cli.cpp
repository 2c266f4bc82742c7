#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "lagraph/checkpoint.hpp"
#include "output_dir.hpp"
#include "test_support.hpp"

using namespace lagraph;
using namespace lagraph::cli;
using lagraph::testing::TempDir;
using lagraph::testing::write_file;
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& cmd, const Options& o, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_guarded(cmd, o, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

Options tiny_train(const fs::path& out) {
  return {{"dataset", std::string(LAGRAPH_TEST_DATA_DIR) + "/MUTAG"},
          {"out", out.string()},
          {"seed", 5},
          {"overrides",
           {{"epochs", "2"}, {"hidden_dim", "8"}, {"encoder_layers", "2"}, {"batch_size", "64"},
            {"learning_rate", "0.01"}}}};
}

}  // namespace

TEST(ResolveConfig, DefaultsOverridesAndSeed) {
  const TrainConfig c = resolve_config({{"level", "node"}, {"seed", 9}, {"overrides", {{"epochs", "7"}}}});
  EXPECT_EQ(c.level, Level::node);
  EXPECT_EQ(c.epochs, 7u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(resolve_config(Options::object()).level, Level::graph);
}

TEST(ResolveConfig, ResolvedConfigRoundTrips) {
  const TrainConfig a = resolve_config({{"overrides", {{"alpha", "2.5"}, {"mask_ratio", "0.4"}}}});
  Options resolved = Options::object();
  for (const auto& [k, v] : config_items(a)) resolved[k] = v;
  const TrainConfig b = resolve_config({{"config", resolved}});
  EXPECT_EQ(config_items(a), config_items(b));
}

TEST(ResolveConfig, ConfigFileAndContradictingLevel) {
  TempDir tmp("cli");
  write_file(tmp.path() / "run.cfg", "level = node\nepochs = 3  # short\n");
  const TrainConfig c = resolve_config({{"config_file", (tmp.path() / "run.cfg").string()}});
  EXPECT_EQ(c.level, Level::node);
  EXPECT_EQ(c.epochs, 3u);
  EXPECT_THROW(resolve_config({{"config_file", (tmp.path() / "run.cfg").string()}, {"level", "graph"}}),
               ConfigError);
}

TEST(ExitCodes, UsageAndRuntimeErrors) {
  TempDir tmp("cli");
  std::string err;
  EXPECT_EQ(run("bogus", Options::object(), &err), exit_usage);
  EXPECT_NE(err.find("unknown command"), std::string::npos);
  EXPECT_EQ(run("train", {{"out", (tmp.path() / "a").string()}}, &err), exit_usage);
  EXPECT_NE(err.find("--dataset"), std::string::npos);
  EXPECT_EQ(run("train", {{"dataset", (tmp.path() / "missing").string()}, {"out", (tmp.path() / "a").string()}}),
            exit_runtime);
  EXPECT_EQ(run("verify", {{"trials", 0}, {"out", (tmp.path() / "v").string()}}), exit_usage);
  EXPECT_EQ(run("train", {{"dataset", "x"}, {"out", "y"}, {"overrides", {{"alpha", "-1"}}}}), exit_usage);
  EXPECT_EQ(run("eval", {{"checkpoint", (tmp.path() / "none.json").string()},
                         {"dataset", std::string(LAGRAPH_TEST_DATA_DIR) + "/MUTAG"},
                         {"level", "graph"},
                         {"out", (tmp.path() / "e").string()}}),
            exit_runtime);
}

TEST(ExitCodes, FailedRunLeavesNoOutputDirectory) {
  TempDir tmp("cli");
  const fs::path out = tmp.path() / "node_on_graph";
  Options o = tiny_train(out);
  o["level"] = "node";
  EXPECT_EQ(run("train", o), exit_usage);
  EXPECT_FALSE(fs::exists(out));
}

TEST(ExitCodes, VerifyHookReportsHardFailure) {
  TempDir tmp("cli");
  EXPECT_EQ(run("verify", {{"trials", 1}, {"samples", 64}, {"masks", 2}, {"suite", "theorem1"},
                           {"multiplier_scale", -1.0}, {"out", (tmp.path() / "v").string()}}),
            exit_hard_failure);
  EXPECT_TRUE(fs::exists(tmp.path() / "v" / "verify.json"));
}

TEST(OutputDirectory, UncommittedRunIsRemoved) {
  TempDir tmp("cli");
  const fs::path root = tmp.path() / "run";
  {
    OutputDir dir(root);
    std::ofstream(dir.file("a.txt")) << "x";
    EXPECT_TRUE(fs::exists(root / "a.txt"));
  }
  EXPECT_FALSE(fs::exists(root));
  {
    OutputDir dir(root);
    std::ofstream(dir.file("a.txt")) << "x";
    dir.commit();
  }
  EXPECT_TRUE(fs::exists(root / "a.txt"));
}

TEST(OutputDirectory, PreexistingFilesSurviveAFailedRun) {
  TempDir tmp("cli");
  const fs::path root = tmp.path() / "run";
  fs::create_directories(root);
  write_file(root / "keep.txt", "k");
  {
    OutputDir dir(root);
    std::ofstream(dir.file("new.txt")) << "n";
  }
  EXPECT_TRUE(fs::exists(root / "keep.txt"));
  EXPECT_FALSE(fs::exists(root / "new.txt"));
}

TEST(Train, SameSeedGivesIdenticalArtifacts) {
  TempDir tmp("cli");
  ASSERT_EQ(run("train", tiny_train(tmp.path() / "a")), exit_ok);
  ASSERT_EQ(run("train", tiny_train(tmp.path() / "b")), exit_ok);
  EXPECT_EQ(read_text(tmp.path() / "a" / "loss.jsonl"), read_text(tmp.path() / "b" / "loss.jsonl"));
  EXPECT_EQ(read_text(tmp.path() / "a" / "checkpoint.json"), read_text(tmp.path() / "b" / "checkpoint.json"));
  const auto m = read_json(tmp.path() / "a" / "manifest.json");
  EXPECT_EQ(m.at("command"), "train");
  EXPECT_EQ(m.at("seed"), 5);
  EXPECT_EQ(m.at("dataset").at("graphs"), 188);
}

TEST(Train, RerunReproducesTheLossLog) {
  TempDir tmp("cli");
  ASSERT_EQ(run("train", tiny_train(tmp.path() / "a")), exit_ok);
  std::ostringstream out;
  ASSERT_EQ(cmd_rerun(tmp.path() / "a" / "manifest.json", (tmp.path() / "r").string(), out), exit_ok);
  EXPECT_EQ(read_text(tmp.path() / "a" / "loss.jsonl"), read_text(tmp.path() / "r" / "loss.jsonl"));
}

TEST(Eval, ReportsFoldScoresForACheckpoint) {
  TempDir tmp("cli");
  ASSERT_EQ(run("train", tiny_train(tmp.path() / "a")), exit_ok);
  ASSERT_EQ(run("eval", {{"checkpoint", (tmp.path() / "a" / "checkpoint.json").string()},
                         {"dataset", std::string(LAGRAPH_TEST_DATA_DIR) + "/MUTAG"},
                         {"level", "graph"},
                         {"folds", 5},
                         {"reps", 2},
                         {"out", (tmp.path() / "e").string()}}),
            exit_ok);
  const auto r = read_json(tmp.path() / "e" / "report.json");
  EXPECT_GT(r.at("mean").get<double>(), 0.5);
  EXPECT_LE(r.at("mean").get<double>(), 1.0);
  EXPECT_EQ(r.at("level"), "graph");
  EXPECT_EQ(run("eval", {{"checkpoint", (tmp.path() / "a" / "checkpoint.json").string()},
                         {"dataset", std::string(LAGRAPH_TEST_DATA_DIR) + "/MUTAG"},
                         {"level", "node"},
                         {"out", (tmp.path() / "n").string()}}),
            exit_runtime);
}

TEST(GenSbm, WritesAReadableNodeDataset) {
  TempDir tmp("cli");
  ASSERT_EQ(run("gen-sbm", {{"nodes", 60}, {"blocks", 3}, {"dim", 5}, {"seed", 2},
                            {"out", (tmp.path() / "sbm").string()}}),
            exit_ok);
  EXPECT_TRUE(is_node_dataset(tmp.path() / "sbm"));
  const NodeDataset ds = parse_nodelevel_dir(tmp.path() / "sbm");
  EXPECT_EQ(ds.graph.num_nodes(), 60u);
  EXPECT_EQ(ds.graph.feature_dim(), 5u);
}

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "lagraph/config.hpp"
#include "lagraph/datasets.hpp"

namespace lagraph::cli {

enum ExitCode : int { exit_ok = 0, exit_hard_failure = 1, exit_usage = 2, exit_runtime = 3 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Resolved options of one command. Every command reads a JSON object so a
/// manifest's "options" field can be replayed as is.
using Options = nlohmann::json;

/// Train config from options: either a resolved "config" object, or an
/// optional "config_file" / "level" followed by "overrides" ([key, value]
/// pairs applied in order, or a key/value object) and "seed".
TrainConfig resolve_config(const Options& options);

bool is_node_dataset(const std::filesystem::path& path);
std::string dataset_name(const std::filesystem::path& path);
GraphDataset load_graph_dataset(const std::filesystem::path& path, std::size_t degree_threshold);

int cmd_train(const Options& options, std::ostream& out);
int cmd_eval(const Options& options, std::ostream& out);
int cmd_verify(const Options& options, std::ostream& out);
int cmd_ablate(const Options& options, std::ostream& out);
int cmd_gen_sbm(const Options& options, std::ostream& out);
/// Replays the command recorded in a manifest, optionally into another
/// output directory.
int cmd_rerun(const std::filesystem::path& manifest, const std::optional<std::string>& out_dir,
              std::ostream& out);

int dispatch(const std::string& command, const Options& options, std::ostream& out);

/// dispatch() with errors reported on err and mapped to exit codes.
int run_guarded(const std::string& command, const Options& options, std::ostream& out,
                std::ostream& err);

}  // namespace lagraph::cli

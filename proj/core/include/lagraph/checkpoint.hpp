#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "lagraph/config.hpp"
#include "lagraph/training.hpp"

namespace lagraph {

inline constexpr int checkpoint_format_version = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  Model model;
  TrainConfig config;
  std::size_t feature_dim = 0;
};

/// JSON document with every weight, batch-norm parameter and running
/// statistic. Doubles are written in shortest round-trip form, so a
/// save/load cycle is bit-exact.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws CheckpointError unless the checkpoint was trained at `level`.
void require_level(const Checkpoint& checkpoint, Level level);

}  // namespace lagraph

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lagraph::cli {

/// Output directory of one run. Files handed out by file() are removed
/// again, together with the directory if this run created it, unless
/// commit() is reached.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  std::filesystem::path file(const std::string& name);
  const std::filesystem::path& root() const { return root_; }
  std::vector<std::string> files() const;
  void commit() { committed_ = true; }

 private:
  std::filesystem::path root_;
  bool created_ = false;
  bool committed_ = false;
  std::vector<std::filesystem::path> files_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace lagraph::cli

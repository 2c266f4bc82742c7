#include "output_dir.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace lagraph::cli {

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  if (root_.empty()) throw std::invalid_argument("output directory must not be empty");
  if (std::filesystem::exists(root_)) {
    if (!std::filesystem::is_directory(root_)) {
      throw std::invalid_argument("output path " + root_.string() + " is not a directory");
    }
  } else {
    std::filesystem::create_directories(root_);
    created_ = true;
  }
}

OutputDir::~OutputDir() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& f : files_) std::filesystem::remove(f, ec);
  if (created_) std::filesystem::remove(root_, ec);  // only if empty
}

std::filesystem::path OutputDir::file(const std::string& name) {
  files_.push_back(root_ / name);
  return files_.back();
}

std::vector<std::string> OutputDir::files() const {
  std::vector<std::string> out;
  for (const auto& f : files_) out.push_back(f.string());
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace lagraph::cli

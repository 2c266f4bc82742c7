#include "lagraph/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lagraph {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError(key + ": expected true|false, got '" + v + "'");
}

template <typename F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

TrainConfig default_config(Level level) {
  TrainConfig c;
  c.level = level;
  if (level == Level::node) {
    c.encoder = EncoderKind::gcn;
    c.encoder_layers = 2;
    c.hidden_dim = 512;
    c.decoder_layers = 1;
    c.decoder_hidden = 512;
    c.alpha = 1.0;
    c.learning_rate = 1e-4;
    c.batch_size = 1;
    c.epochs = 500;
  }
  return c;
}

void apply_setting(TrainConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "level") c.level = wrap(key, [&] { return parse_level(v); });
  else if (key == "encoder") c.encoder = wrap(key, [&] { return parse_encoder_kind(v); });
  else if (key == "encoder_layers") c.encoder_layers = to_uint(key, v);
  else if (key == "hidden_dim") c.hidden_dim = to_uint(key, v);
  else if (key == "decoder") c.decoder = wrap(key, [&] { return parse_decoder_kind(v); });
  else if (key == "decoder_layers") c.decoder_layers = to_uint(key, v);
  else if (key == "decoder_hidden") c.decoder_hidden = to_uint(key, v);
  else if (key == "batch_norm") c.batch_norm = to_bool(key, v);
  else if (key == "final_activation") c.final_activation = to_bool(key, v);
  else if (key == "mask_ratio") c.mask_ratio = to_double(key, v);
  else if (key == "noise_sd") c.noise_sd = to_double(key, v);
  else if (key == "mask_mode") c.mask_mode = wrap(key, [&] { return parse_mask_mode(v); });
  else if (key == "alpha") c.alpha = to_double(key, v);
  else if (key == "variant") c.variant = wrap(key, [&] { return parse_variant(v); });
  else if (key == "learning_rate") c.learning_rate = to_double(key, v);
  else if (key == "weight_decay") c.weight_decay = to_double(key, v);
  else if (key == "batch_size") c.batch_size = to_uint(key, v);
  else if (key == "epochs") c.epochs = to_uint(key, v);
  else if (key == "seed") c.seed = to_uint(key, v);
  else if (key == "degree_threshold") c.degree_threshold = to_uint(key, v);
  else if (key == "subgraph_nodes") c.subgraph_nodes = to_uint(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

TrainConfig parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> items;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(n) + ": expected 'key = value'");
    }
    items.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  TrainConfig c;
  for (const auto& [k, v] : items)
    if (k == "level") c = default_config(wrap(k, [&] { return parse_level(v); }));
  for (const auto& [k, v] : items) apply_setting(c, k, v);
  return c;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const TrainConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("invalid config: " + m); };
  if (c.encoder_layers < 1) fail("encoder_layers must be at least 1");
  if (c.hidden_dim < 1) fail("hidden_dim must be at least 1");
  if (c.decoder_layers < 1) fail("decoder_layers must be at least 1");
  if (c.decoder_hidden < 1) fail("decoder_hidden must be at least 1");
  if (!(c.mask_ratio > 0.0 && c.mask_ratio <= 1.0)) fail("mask_ratio must lie in (0, 1]");
  if (!(c.noise_sd >= 0.0)) fail("noise_sd must be non-negative");
  if (!(c.alpha >= 0.0)) fail("alpha must be non-negative");
  if (!(c.learning_rate > 0.0)) fail("learning_rate must be positive");
  if (!(c.weight_decay >= 0.0)) fail("weight_decay must be non-negative");
  if (c.batch_size < 1) fail("batch_size must be at least 1");
  if (c.epochs < 1) fail("epochs must be at least 1");
  if (c.level == Level::node && c.decoder == DecoderKind::gcn) {
    fail("node-level training needs a fully-connected decoder");
  }
}

std::vector<std::pair<std::string, std::string>> config_items(const TrainConfig& c) {
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  return {
      {"level", to_string(c.level)},
      {"encoder", to_string(c.encoder)},
      {"encoder_layers", std::to_string(c.encoder_layers)},
      {"hidden_dim", std::to_string(c.hidden_dim)},
      {"decoder", to_string(c.decoder)},
      {"decoder_layers", std::to_string(c.decoder_layers)},
      {"decoder_hidden", std::to_string(c.decoder_hidden)},
      {"batch_norm", b(c.batch_norm)},
      {"final_activation", b(c.final_activation)},
      {"mask_ratio", format_double(c.mask_ratio)},
      {"noise_sd", format_double(c.noise_sd)},
      {"mask_mode", to_string(c.mask_mode)},
      {"alpha", format_double(c.alpha)},
      {"variant", to_string(c.variant)},
      {"learning_rate", format_double(c.learning_rate)},
      {"weight_decay", format_double(c.weight_decay)},
      {"batch_size", std::to_string(c.batch_size)},
      {"epochs", std::to_string(c.epochs)},
      {"seed", std::to_string(c.seed)},
      {"degree_threshold", std::to_string(c.degree_threshold)},
      {"subgraph_nodes", std::to_string(c.subgraph_nodes)},
  };
}

std::string format_config(const TrainConfig& c) {
  std::string out;
  for (const auto& [k, v] : config_items(c)) out += k + " = " + v + "\n";
  return out;
}

}  // namespace lagraph

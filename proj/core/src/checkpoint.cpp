#include "lagraph/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lagraph {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

Matrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw CheckpointError("matrix data length does not match its shape");
  return Matrix(rows, cols, std::move(data));
}

json linear_json(const Linear& l) {
  return {{"weight", matrix_json(l.weight.value())}, {"bias", matrix_json(l.bias.value())}};
}

void load_into(Value target, const json& j, const char* what) {
  Matrix m = matrix_from(j);
  if (!m.same_shape(target.value())) {
    throw CheckpointError(std::string("checkpoint ") + what + " has shape " +
                          shape_string(m.rows(), m.cols()) + ", model expects " +
                          shape_string(target.rows(), target.cols()));
  }
  target.mutable_value() = std::move(m);
}

void load_linear(Linear& l, const json& j) {
  load_into(l.weight, j.at("weight"), "weight");
  load_into(l.bias, j.at("bias"), "bias");
}

json bn_json(const BatchNorm& bn) {
  return {{"gamma", matrix_json(bn.gamma.value())},
          {"beta", matrix_json(bn.beta.value())},
          {"running_mean", bn.running_mean},
          {"running_var", bn.running_var},
          {"momentum", bn.momentum},
          {"eps", bn.eps}};
}

void load_bn(BatchNorm& bn, const json& j) {
  load_into(bn.gamma, j.at("gamma"), "gamma");
  load_into(bn.beta, j.at("beta"), "beta");
  auto mean = j.at("running_mean").get<std::vector<double>>();
  auto var = j.at("running_var").get<std::vector<double>>();
  if (mean.size() != bn.running_mean.size() || var.size() != bn.running_var.size()) {
    throw CheckpointError("batch-norm running statistics have the wrong length");
  }
  bn.running_mean = std::move(mean);
  bn.running_var = std::move(var);
  bn.momentum = j.at("momentum").get<double>();
  bn.eps = j.at("eps").get<double>();
}

json optional_bn(const std::optional<BatchNorm>& bn) { return bn ? bn_json(*bn) : json(nullptr); }

void load_optional_bn(std::optional<BatchNorm>& bn, const json& j) {
  if (j.is_null() != !bn.has_value()) throw CheckpointError("batch-norm layout does not match config");
  if (bn) load_bn(*bn, j);
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  json layers = json::array();
  for (const auto& l : ckpt.model.encoder.layers) {
    layers.push_back({{"lin1", linear_json(l.lin1)},
                      {"bn_inner", optional_bn(l.bn_inner)},
                      {"lin2", l.lin2 ? linear_json(*l.lin2) : json(nullptr)},
                      {"bn_out", optional_bn(l.bn_out)}});
  }
  json dec_layers = json::array();
  for (const auto& l : ckpt.model.decoder.layers) dec_layers.push_back(linear_json(l));
  json dec_norms = json::array();
  for (const auto& bn : ckpt.model.decoder.norms) dec_norms.push_back(bn_json(bn));
  json config = json::object();
  for (const auto& [k, v] : config_items(ckpt.config)) config[k] = v;

  json doc = {{"format", "lagraph-checkpoint"},
              {"format_version", checkpoint_format_version},
              {"level", to_string(ckpt.model.level)},
              {"feature_dim", ckpt.feature_dim},
              {"config", config},
              {"encoder", {{"layers", layers}}},
              {"decoder", {{"layers", dec_layers}, {"norms", dec_norms}}}};

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out << doc.dump() << '\n';
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw CheckpointError("checkpoint " + path.string() + " is truncated or corrupt (reader format_version " +
                          std::to_string(checkpoint_format_version) + "): " + e.what());
  }
  try {
    if (doc.value("format", "") != "lagraph-checkpoint") {
      throw CheckpointError(path.string() + " is not a lagraph checkpoint");
    }
    const int version = doc.at("format_version").get<int>();
    if (version != checkpoint_format_version) {
      throw CheckpointError("checkpoint format_version " + std::to_string(version) +
                            " is not supported (expected " +
                            std::to_string(checkpoint_format_version) + ")");
    }
    Checkpoint ckpt;
    const std::string level = doc.at("level").get<std::string>();
    ckpt.config = default_config(parse_level(level));
    for (const auto& [k, v] : doc.at("config").items()) apply_setting(ckpt.config, k, v.get<std::string>());
    ckpt.feature_dim = doc.at("feature_dim").get<std::size_t>();
    Rng rng(0);
    ckpt.model = make_model(ckpt.config, ckpt.feature_dim, rng);
    ckpt.model.level = parse_level(level);

    const auto& layers = doc.at("encoder").at("layers");
    if (layers.size() != ckpt.model.encoder.layers.size()) {
      throw CheckpointError("encoder layer count does not match config");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
      auto& l = ckpt.model.encoder.layers[i];
      load_linear(l.lin1, layers[i].at("lin1"));
      load_optional_bn(l.bn_inner, layers[i].at("bn_inner"));
      if (layers[i].at("lin2").is_null() != !l.lin2.has_value()) {
        throw CheckpointError("encoder layer layout does not match config");
      }
      if (l.lin2) load_linear(*l.lin2, layers[i].at("lin2"));
      load_optional_bn(l.bn_out, layers[i].at("bn_out"));
    }
    const auto& dl = doc.at("decoder").at("layers");
    const auto& dn = doc.at("decoder").at("norms");
    if (dl.size() != ckpt.model.decoder.layers.size() || dn.size() != ckpt.model.decoder.norms.size()) {
      throw CheckpointError("decoder layout does not match config");
    }
    for (std::size_t i = 0; i < dl.size(); ++i) load_linear(ckpt.model.decoder.layers[i], dl[i]);
    for (std::size_t i = 0; i < dn.size(); ++i) load_bn(ckpt.model.decoder.norms[i], dn[i]);
    return ckpt;
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint " + path.string() + " is malformed (format_version " +
                          std::to_string(checkpoint_format_version) + "): " + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError("checkpoint " + path.string() + " has an invalid config: " + e.what());
  }
}

void require_level(const Checkpoint& checkpoint, Level level) {
  if (checkpoint.model.level != level) {
    throw CheckpointError("checkpoint was trained at " + to_string(checkpoint.model.level) +
                          " level, command needs " + to_string(level) + " level");
  }
}

}  // namespace lagraph

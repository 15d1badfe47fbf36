#include "flowguard/gnn/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flowguard/errors.hpp"
#include "flowguard/features.hpp"

namespace flowguard::gnn {

using nlohmann::json;

namespace {
constexpr const char* kFormat = "flowguard-checkpoint";
}

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  const auto& p = ckpt.params;
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kCheckpointVersion;
  doc["config"] = {{"arch", std::string(to_string(p.config.arch))},
                   {"num_layers", p.config.num_layers},
                   {"hidden_dim", p.config.hidden_dim},
                   {"out_dim", p.config.out_dim},
                   {"input_dim", p.config.input_dim},
                   {"direction", std::string(to_string(p.config.direction))},
                   {"activation", "relu"}};
  doc["seed"] = p.seed;
  doc["feature_columns"] = ckpt.feature_columns;
  doc["tensors"] = json::array();
  for (const auto& t : p.tensors) {
    json data = json::array();
    for (Eigen::Index r = 0; r < t.value.rows(); ++r)
      for (Eigen::Index c = 0; c < t.value.cols(); ++c) data.push_back(t.value(r, c));
    doc["tensors"].push_back({{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}, {"data", data}});
  }
  return doc.dump();
}

Checkpoint checkpoint_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("malformed checkpoint", e.byte);
  }
  if (!doc.is_object() || doc.value("format", "") != kFormat) throw SchemaError("$.format", "not a flowguard checkpoint");
  if (doc.value("version", 0) != kCheckpointVersion)
    throw SchemaError("$.version", "unsupported checkpoint version");

  Checkpoint ckpt;
  try {
    const json& c = doc.at("config");
    ModelConfig config;
    config.arch = arch_from_string(c.at("arch").get<std::string>());
    config.num_layers = c.at("num_layers").get<int>();
    config.hidden_dim = c.at("hidden_dim").get<int>();
    config.out_dim = c.at("out_dim").get<int>();
    config.input_dim = c.at("input_dim").get<int>();
    config.direction = direction_from_string(c.at("direction").get<std::string>());
    ckpt.feature_columns = doc.at("feature_columns").get<std::vector<int>>();
    ckpt.params = ModelParams::init(config, doc.at("seed").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw SchemaError("$.config", e.what());
  }
  if (ckpt.feature_columns.size() != static_cast<std::size_t>(ckpt.params.config.input_dim))
    throw ShapeError("feature column list does not match input_dim");
  for (int col : ckpt.feature_columns)
    if (col < 0 || col >= feature_col::kWidth) throw SchemaError("$.feature_columns", "column index out of range");

  auto tensors_it = doc.find("tensors");
  if (tensors_it == doc.end()) throw SchemaError("$.tensors", "required field missing");
  const json& tensors = *tensors_it;
  auto& expected = ckpt.params.tensors;
  if (!tensors.is_array() || tensors.size() != expected.size())
    throw ShapeError("checkpoint has " + std::to_string(tensors.size()) + " tensors, config implies " +
                     std::to_string(expected.size()));
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const json& t = tensors[i];
    auto& slot = expected[i];
    const auto path = "$.tensors[" + std::to_string(i) + "]";
    if (!t.is_object()) throw SchemaError(path, "expected an object");
    if (t.value("name", "") != slot.name) throw ShapeError(path + ": expected tensor '" + slot.name + "'");
    if (t.value("rows", -1) != slot.value.rows() || t.value("cols", -1) != slot.value.cols())
      throw ShapeError(path + ": shape mismatch for '" + slot.name + "'");
    if (!t.is_object() || !t.contains("data")) throw SchemaError(path + ".data", "required field missing");
    const json& data = t["data"];
    if (!data.is_array() || data.size() != static_cast<std::size_t>(slot.value.size()))
      throw ShapeError(path + ": data length mismatch for '" + slot.name + "'");
    for (Eigen::Index k = 0; k < slot.value.size(); ++k) {
      const json& x = data[static_cast<std::size_t>(k)];
      if (!x.is_number()) throw SchemaError(path + ".data", "expected numbers");
      const double v = x.get<double>();
      if (!std::isfinite(v)) throw SchemaError(path + ".data", "non-finite parameter");
      slot.value(k / slot.value.cols(), k % slot.value.cols()) = v;
    }
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write checkpoint '" + path.string() + "'");
  out << checkpoint_to_json(ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

}  // namespace flowguard::gnn

#include "geomsign/checkpoint.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geomsign/errors.hpp"
#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs assume a little-endian host");

namespace geomsign {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {
std::string blob_name(size_t index, const std::string& param_name) {
  std::string safe = param_name;
  for (char& c : safe)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu_", index);
  return buf + safe + ".bin";
}
}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& dir) {
  const auto specs = param_specs(ckpt.config);
  if (specs.size() != ckpt.params.size())
    throw std::invalid_argument("save_checkpoint: parameter count does not match config");
  fs::create_directories(fs::path(dir) / "params");

  json j;
  j["version"] = 1;
  j["model_config"] = json::parse(model_config_to_json(ckpt.config));
  j["training_step"] = ckpt.training_step;
  j["dtype"] = "float32";
  j["params"] = json::array();
  for (size_t i = 0; i < specs.size(); ++i) {
    if (ckpt.params[i].shape != specs[i].shape)
      throw std::invalid_argument("save_checkpoint: shape mismatch for " + specs[i].name);
    const std::string file = blob_name(i, specs[i].name);
    j["params"].push_back(
        json{{"name", specs[i].name}, {"shape", specs[i].shape}, {"file", "params/" + file}});
    std::ofstream out(fs::path(dir) / "params" / file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint blob for " + specs[i].name);
    out.write(reinterpret_cast<const char*>(ckpt.params[i].data.data()),
              static_cast<std::streamsize>(ckpt.params[i].data.size() * sizeof(float)));
    if (!out) throw IoError("error writing checkpoint blob for " + specs[i].name);
  }
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint manifest in '" + dir + "'");
  out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint manifest in '" + dir + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint manifest is not valid JSON: ") + e.what());
  }

  Checkpoint ckpt;
  try {
    ckpt.config = model_config_from_json(j.at("model_config").dump());
    ckpt.training_step = j.at("training_step").get<size_t>();
    if (j.at("dtype").get<std::string>() != "float32")
      throw FormatError("checkpoint: unsupported dtype");
    const auto specs = param_specs(ckpt.config);
    const auto& plist = j.at("params");
    if (plist.size() != specs.size())
      throw FormatError("checkpoint: parameter table does not match the model config");
    for (size_t i = 0; i < specs.size(); ++i) {
      const auto shape = plist[i].at("shape").get<std::vector<size_t>>();
      if (shape != specs[i].shape ||
          plist[i].at("name").get<std::string>() != specs[i].name)
        throw FormatError("checkpoint: unexpected entry for parameter " + specs[i].name);
      const std::string file = plist[i].at("file").get<std::string>();
      std::ifstream blob(fs::path(dir) / file, std::ios::binary);
      if (!blob) throw IoError("cannot open checkpoint blob '" + file + "'");
      Tensor<float> t(shape);
      blob.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(float)));
      if (static_cast<size_t>(blob.gcount()) != t.data.size() * sizeof(float))
        throw FormatError("checkpoint blob '" + file + "' is truncated");
      ckpt.params.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint manifest: missing field: ") + e.what());
  }
  return ckpt;
}

}  // namespace geomsign

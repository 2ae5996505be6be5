#include "vars/serialize.hpp"

#include <fstream>

#include <json.hpp>

#include "vars/errors.hpp"
#include "vars/version.hpp"

namespace vars {

namespace {

using json = nlohmann::ordered_json;

json model_config_to_json(const ModelConfig& c) {
  json j;
  j["encoder"] = to_string(c.encoder);
  j["in_dim"] = c.in_dim;
  j["feature_dim"] = c.feature_dim;
  j["encoder_hidden"] = c.encoder_hidden;
  j["head_hidden"] = c.head_hidden;
  j["aggregation"] = to_string(c.aggregation);
  j["attention_init"] =
      c.attention_init == WeightInit::identity_matrix ? "identity" : "fan_in";
  return j;
}

ModelConfig model_config_from(const json& j, ModelConfig c) {
  if (j.contains("encoder")) c.encoder = encoder_kind_from_string(j["encoder"].get<std::string>());
  if (j.contains("in_dim")) c.in_dim = j["in_dim"].get<std::size_t>();
  if (j.contains("feature_dim")) c.feature_dim = j["feature_dim"].get<std::size_t>();
  if (j.contains("encoder_hidden")) c.encoder_hidden = j["encoder_hidden"].get<std::size_t>();
  if (j.contains("head_hidden")) c.head_hidden = j["head_hidden"].get<std::size_t>();
  if (j.contains("aggregation"))
    c.aggregation = aggregation_kind_from_string(j["aggregation"].get<std::string>());
  if (j.contains("attention_init")) {
    const std::string init = j["attention_init"].get<std::string>();
    if (init == "identity")
      c.attention_init = WeightInit::identity_matrix;
    else if (init == "fan_in")
      c.attention_init = WeightInit::fan_in;
    else
      throw ConfigError("unknown attention_init '" + init + "'");
  }
  return c;
}

json train_config_to_json(const TrainConfig& c) {
  json j;
  j["lr0"] = c.lr0;
  j["decay_factor"] = c.decay_factor;
  j["decay_every"] = c.decay_every;
  j["decay_unit"] = c.decay_unit == LrDecayUnit::epochs ? "epochs" : "steps";
  j["batch_size"] = c.batch_size;
  j["max_epochs"] = c.max_epochs;
  j["seed"] = c.seed;
  return j;
}

TrainConfig train_config_from(const json& j, TrainConfig c) {
  if (j.contains("lr0")) c.lr0 = j["lr0"].get<double>();
  if (j.contains("decay_factor")) c.decay_factor = j["decay_factor"].get<double>();
  if (j.contains("decay_every")) c.decay_every = j["decay_every"].get<int>();
  if (j.contains("decay_unit")) {
    const std::string unit = j["decay_unit"].get<std::string>();
    if (unit == "epochs")
      c.decay_unit = LrDecayUnit::epochs;
    else if (unit == "steps")
      c.decay_unit = LrDecayUnit::steps;
    else
      throw ConfigError("unknown decay_unit '" + unit + "' (expected epochs or steps)");
  }
  if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int>();
  if (j.contains("max_epochs")) c.max_epochs = j["max_epochs"].get<int>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  return c;
}

json synthetic_spec_to_json(const SyntheticSpec& s) {
  json j;
  j["n_samples"] = s.n_samples;
  j["views_per_sample"] = s.views_per_sample;
  j["n_informative_views"] = s.n_informative_views;
  j["dim"] = s.dim;
  j["class_separation"] = s.class_separation;
  j["noise_sigma"] = s.noise_sigma;
  j["seed"] = s.seed;
  j["foul_frequencies"] = s.foul_frequencies;
  j["severity_frequencies"] = s.severity_frequencies;
  return j;
}

SyntheticSpec synthetic_spec_from(const json& j, SyntheticSpec s) {
  if (j.contains("n_samples")) s.n_samples = j["n_samples"].get<std::size_t>();
  if (j.contains("views_per_sample")) s.views_per_sample = j["views_per_sample"].get<std::size_t>();
  if (j.contains("n_informative_views"))
    s.n_informative_views = j["n_informative_views"].get<std::size_t>();
  if (j.contains("dim")) s.dim = j["dim"].get<std::size_t>();
  if (j.contains("class_separation")) s.class_separation = j["class_separation"].get<double>();
  if (j.contains("noise_sigma")) s.noise_sigma = j["noise_sigma"].get<double>();
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("foul_frequencies"))
    s.foul_frequencies = j["foul_frequencies"].get<std::vector<double>>();
  if (j.contains("severity_frequencies"))
    s.severity_frequencies = j["severity_frequencies"].get<std::vector<double>>();
  return s;
}

json parse_text(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

json matrix_to_json(const Matrix& m) {
  json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["data"] = m.data;
  return j;
}

Matrix matrix_from_json(const json& j) {
  Matrix m;
  m.rows = j.at("rows").get<std::size_t>();
  m.cols = j.at("cols").get<std::size_t>();
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != m.rows * m.cols)
    throw ParseError("checkpoint: tensor data length does not match its shape");
  return m;
}

}  // namespace

std::string to_json_text(const ModelConfig& config) {
  return model_config_to_json(config).dump(2);
}
std::string to_json_text(const TrainConfig& config) {
  return train_config_to_json(config).dump(2);
}
std::string to_json_text(const SyntheticSpec& spec) {
  return synthetic_spec_to_json(spec).dump(2);
}

ModelConfig model_config_from_json(std::string_view text, ModelConfig defaults) {
  return model_config_from(parse_text(text, "model config"), defaults);
}
TrainConfig train_config_from_json(std::string_view text, TrainConfig defaults) {
  return train_config_from(parse_text(text, "train config"), defaults);
}
SyntheticSpec synthetic_spec_from_json(std::string_view text, SyntheticSpec defaults) {
  return synthetic_spec_from(parse_text(text, "synthetic spec"), defaults);
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  json j;
  j["format"] = "vars-checkpoint";
  j["format_version"] = 1;
  j["created_by"] = std::string("vars ") + kVersion;
  j["model"]["config"] = model_config_to_json(ckpt.model.config);
  json params = json::object();
  for (const auto& [name, m] : ckpt.model.parameters()) params[name] = matrix_to_json(*m);
  j["model"]["parameters"] = std::move(params);
  j["train_config"] = train_config_to_json(ckpt.train_config);
  json history = json::array();
  for (const EpochStats& e : ckpt.history) {
    json h;
    h["epoch"] = e.epoch;
    h["lr"] = e.lr;
    h["train_loss"] = e.train_loss;
    h["val_loss"] = e.val_loss;
    h["val_foul_accuracy"] = e.val_foul_accuracy;
    h["val_off_accuracy"] = e.val_off_accuracy;
    history.push_back(std::move(h));
  }
  j["history"] = std::move(history);
  j["best_epoch"] = ckpt.best_epoch;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open checkpoint file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!j.contains("format") || j["format"] != "vars-checkpoint")
    throw ParseError(path.string() + ": not a vars checkpoint file");
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
    throw ParseError(path.string() + ": unsupported checkpoint format version");

  try {
    Checkpoint ckpt;
    ckpt.model.config = model_config_from(j.at("model").at("config"), ModelConfig{});
    // Materialize parameter shapes from the config, then fill from the file.
    ckpt.model = VarsModel::init(ckpt.model.config, 0);
    const json& params = j.at("model").at("parameters");
    for (const VarsModel::ParamRef& p : ckpt.model.parameters()) {
      if (!params.contains(p.name))
        throw ParseError(path.string() + ": checkpoint is missing tensor " + p.name);
      Matrix loaded = matrix_from_json(params.at(p.name));
      if (!loaded.same_shape(*p.value))
        throw ParseError(path.string() + ": tensor " + p.name + " has shape " +
                         shape_str(loaded) + ", expected " + shape_str(*p.value));
      *p.value = std::move(loaded);
    }
    ckpt.train_config = train_config_from(j.at("train_config"), TrainConfig{});
    if (j.contains("history")) {
      for (const json& h : j["history"]) {
        EpochStats e;
        e.epoch = h.at("epoch").get<int>();
        e.lr = h.at("lr").get<double>();
        e.train_loss = h.at("train_loss").get<double>();
        e.val_loss = h.at("val_loss").get<double>();
        e.val_foul_accuracy = h.at("val_foul_accuracy").get<double>();
        e.val_off_accuracy = h.at("val_off_accuracy").get<double>();
        ckpt.history.push_back(e);
      }
    }
    if (j.contains("best_epoch")) ckpt.best_epoch = j["best_epoch"].get<int>();
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed checkpoint: " + e.what());
  }
}

}  // namespace vars

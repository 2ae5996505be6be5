#pragma once

#include <string>
#include <string_view>

#include "vars/data.hpp"
#include "vars/model.hpp"

namespace vars {

// JSON round-trips of the run configuration structs. The *_from_json readers
// start from `defaults` and override only the keys present in `text`, so a
// config file may be partial.
std::string to_json_text(const ModelConfig& config);
std::string to_json_text(const TrainConfig& config);
std::string to_json_text(const SyntheticSpec& spec);

ModelConfig model_config_from_json(std::string_view text, ModelConfig defaults = {});
TrainConfig train_config_from_json(std::string_view text, TrainConfig defaults = {});
SyntheticSpec synthetic_spec_from_json(std::string_view text, SyntheticSpec defaults = {});

}  // namespace vars

#pragma once

#include <string>

#include "json.hpp"
#include "meshattn/model.hpp"
#include "meshattn/train.hpp"

namespace meshattn {

using Json = nlohmann::json;

// Serialization is strict both ways: every field is written, unknown keys are
// rejected with InvalidConfig so config typos fail loudly.

Json to_json(const PeSpec& spec);
PeSpec pe_spec_from_json(const Json& j);

Json to_json(const AugmentSpec& spec);
AugmentSpec augment_spec_from_json(const Json& j);

Json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const Json& j);

Json to_json(const Schedule& s);
Schedule schedule_from_json(const Json& j);

Json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

}  // namespace meshattn

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "otail/counting.hpp"
#include "otail/model.hpp"
#include "otail/sequence.hpp"

namespace otail {

using nlohmann::json;

json model_to_json(const TailModel& m);
TailModel model_from_json(const json& j);

json counting_to_json(const CountingDist& c);
CountingDist counting_from_json(const json& j);

json sequence_to_json(const SequenceSpec& s);
SequenceSpec sequence_from_json(const json& j);

// Run configuration: either a single model (classify) or a sequence+counting
// pair (convolve / random-sum / check / mc), with an optional kappa.
struct RunConfig {
    std::optional<TailModel> model;
    std::optional<SequenceSpec> sequence;
    std::optional<CountingDist> counting;
    std::optional<long> kappa;
};

RunConfig run_config_from_json(const json& j);
json run_config_to_json(const RunConfig& cfg);

// FNV-1a over the canonical (sorted-key) serialization
std::string config_hash(const json& j);

}

#pragma once

#include <string>

#include <json.hpp>

#include "otail/classify.hpp"
#include "otail/mc.hpp"
#include "otail/random_sum.hpp"
#include "otail/tail_grid.hpp"
#include "otail/theorem.hpp"

namespace otail {

using nlohmann::json;

// %.17g: round-trippable and byte-stable across runs
std::string fmt17(double v);

json provenance(const json& config, const std::string& command);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const json& j);

// every CSV starts with a '#'-prefixed provenance line (tool version,
// config hash) so emitted files are self-identifying
std::string csv_provenance_line(const json& prov);

std::string tail_grid_csv(const TailGrid& g, const json& prov);
json tail_grid_to_json(const TailGrid& g, const json& prov);

std::string ratio_csv(const RatioReport& r, const json& prov);
json ratio_report_to_json(const RatioReport& r);
json class_verdict_to_json(const ClassVerdict& v, const json& prov);

json condition_report_to_json(const ConditionReport& r, const json& prov);

std::string mc_csv(const McTailResult& r, const json& prov);
json mc_manifest(const McTailResult& r, const json& prov);

json decomposition_to_json(const DecompositionTrace& t, double x, const json& prov);

}

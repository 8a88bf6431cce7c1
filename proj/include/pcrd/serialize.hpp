#pragma once

#include "pcrd/metrics.hpp"
#include "pcrd/optimizer.hpp"
#include "pcrd/rdmodel.hpp"

#include <json.hpp>

namespace pcrd {

// Infinite pc_psnr (identical clouds) crosses JSON as the string "inf";
// every other number stays a number.
void to_json(nlohmann::json& j, const DistortionReport& r);
void from_json(const nlohmann::json& j, DistortionReport& r);

void to_json(nlohmann::json& j, const RdModels& m);
void from_json(const nlohmann::json& j, RdModels& m);

void to_json(nlohmann::json& j, const TraceEntry& t);
void from_json(const nlohmann::json& j, TraceEntry& t);

void to_json(nlohmann::json& j, const SolveResult& r);
void from_json(const nlohmann::json& j, SolveResult& r);

}  // namespace pcrd

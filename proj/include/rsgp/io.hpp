#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "rsgp/metrics.hpp"
#include "rsgp/objective.hpp"
#include "rsgp/protocol.hpp"

namespace rsgp {

/// 17 significant digits, round-trips any double.
std::string fmt17(double v);

void write_trajectory_csv(std::ostream& os, std::span<const TrajectorySample> samples, std::size_t d,
                          const std::string& algorithm);
void write_sever_log_csv(std::ostream& os, std::span<const SeverEvent> log);

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

nlohmann::json instance_to_json(const ObjectiveInstance& inst);
ObjectiveInstance instance_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const TrialReport& r);

}  // namespace rsgp

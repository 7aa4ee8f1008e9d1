#pragma once

#include <json.hpp>
#include <string>

#include "censee/clad.hpp"
#include "censee/inference.hpp"
#include "censee/simulate.hpp"

namespace censee {

using Json = nlohmann::ordered_json;

Json to_json(const Eigen::VectorXd& v);

Json pipeline_config_json(const PipelineConfig& cfg);
Json sim_config_json(const SimConfig& cfg);

Json fit_report(const FitResult& fit, const Json& config);
Json ci_report(const PipelineResult& pr, Eigen::Index n, Eigen::Index p,
               const Json& config);
Json coverage_report(const CoverageReport& rep);
Json truth_report(const CoefVector& truth, double censor_threshold, const Json& config);
Json error_report(const std::string& stage, const std::string& message);

void write_text(const std::string& path, const std::string& text);

}  // namespace censee

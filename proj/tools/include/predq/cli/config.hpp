#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "predq/engine/run_control.hpp"
#include "predq/llmserve/request.hpp"
#include "predq/llmserve/simulator.hpp"
#include "predq/llmserve/workload.hpp"
#include "predq/multiserver/cluster.hpp"
#include "predq/policies/policy.hpp"
#include "predq/workload/prediction.hpp"
#include "predq/workload/service.hpp"

namespace predq::cli {

using nlohmann::json;

/// Every key the runner understands, with its default value.
json default_config();

/// Defaults, overlaid with `user` (RFC 7386 merge patch).
json effective_config(const json& user);

/// Applies `a.b.c=value` to `config`. The value is parsed as JSON when
/// possible and kept as a string otherwise.
void apply_override(json& config, const std::string& assignment);

workload::ServiceDistribution parse_service(const json& j);
workload::PredictionModel parse_prediction(const json& j);
policies::RankPolicy parse_policy(const json& j);
engine::RunControl parse_control(const json& j);
multiserver::ClusterConfig parse_cluster(const json& j);

llm::GpuConfig parse_gpu(const json& j);
llm::ClusterOrg parse_cluster_org(const json& j);
llm::LlmPolicy parse_llm_policy(const json& j);
llm::Strategies parse_strategies(const json& j);
llm::TokenDistribution parse_tokens(const json& j);
llm::LlmWorkloadConfig parse_llm_workload(const json& j);

/// Parses every section the scenario uses; throws ConfigError on the first
/// invalid parameter so that nothing runs with a bad config.
void validate_config(const json& config);

}  // namespace predq::cli

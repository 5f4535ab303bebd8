#include "predq/cli/config.hpp"

#include <algorithm>
#include <cctype>

#include "predq/error.hpp"

namespace predq::cli {

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) throw ConfigError(std::string("missing config key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

const char* const kPolicyNames =
    "FIFO, SJF, PSJF, SRPT, SPJF, PSPJF, SPRPT, SPRPT-BOUNCE, THRESHOLD-PREEMPT, THRESHOLD-NO-PREEMPT, "
    "PREDICTION-PREEMPT, PREDICTION-NO-PREEMPT, SKIP-PREDICT, DELAY-PREDICT, TRAIL";

}  // namespace

json default_config() {
  const llm::GpuConfig gpu;
  return json{
      {"scenario", "single_queue"},
      {"seed", nullptr},
      {"format", "csv"},
      {"control", {{"warmup_jobs", 100000}, {"measured_jobs", 1000000}, {"max_sim_time", nullptr},
                   {"max_in_system", 100000}}},
      {"workload",
       {{"arrival_rate", 0.8},
        {"service", {{"kind", "exponential"}, {"mean", 1.0}}},
        {"prediction", {{"kind", "exponential_mean"}}},
        {"trace", nullptr}}},
      {"policy",
       {{"name", "FIFO"},
        {"threshold", 1.0},
        {"sprpt_long", false},
        {"lifo_short", false},
        {"c", 0.5},
        {"limit", 1.0},
        {"cost", {{"kind", "external"}, {"cheap", 0.0}, {"full", 0.0}}}}},
      {"cluster", {{"servers", 100}, {"d", 2}, {"arrival_rate", 0.9}, {"preemptive", false}, {"threshold", 1.0}}},
      {"llm",
       {{"organization",
         {{"kind", "pooled"}, {"gpus", 1}, {"prefill_gpus", 1}, {"decode_gpus", 1}, {"kv_transfer_seconds_per_gb", 0.0}}},
        {"gpu",
         {{"kv_capacity", gpu.kv_capacity},
          {"bytes_per_token", gpu.bytes_per_token},
          {"tpot", gpu.tpot},
          {"ttft_base", gpu.ttft_base},
          {"ttft_per_token", gpu.ttft_per_token},
          {"prefill_chunk", gpu.prefill_chunk},
          {"batch_limit", gpu.batch_limit},
          {"swap_seconds_per_gb", gpu.swap_seconds_per_gb}}},
        {"policy", {{"name", "FIFO"}, {"c", 0.5}, {"basis", "output"}, {"trail_age", "tokens"}}},
        {"strategies", {{"preemption", "discard"}, {"api", "preserve"}}},
        {"workload",
         {{"requests", 2000},
          {"warmup", 0},
          {"arrival_rate", nullptr},
          {"load", 0.8},
          {"input", {{"kind", "constant"}, {"value", 128}}},
          {"output", {{"kind", "bimodal"}, {"first", 10}, {"second", 500}, {"p_first", 0.5}}},
          {"prediction", {{"kind", "exact"}}},
          {"api_probability", 0.0},
          {"api_calls_per_request", 1},
          {"api_duration_mean", 1.0},
          {"api_strategy", nullptr},
          {"trace", nullptr}}}}},
      {"analytic", {{"formula", "mm1_fifo"}, {"lambda", 0.5}, {"threshold", 1.0}, {"mean", 1.0}, {"second_moment", 2.0}}},
  };
}

json effective_config(const json& user) {
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  json config = default_config();
  config.merge_patch(user);
  return config;
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("empty key in override '" + path + "'");
    if (!node->is_object()) throw ConfigError("override path '" + path + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

workload::ServiceDistribution parse_service(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "exponential") return workload::ServiceDistribution::exponential(j.value("mean", 1.0));
  if (kind == "weibull") return workload::ServiceDistribution::weibull_half();
  if (kind == "deterministic") return workload::ServiceDistribution::deterministic(get<double>(j, "value"));
  if (kind == "empirical") return workload::ServiceDistribution::empirical(get<std::vector<double>>(j, "values"));
  throw ConfigError("unknown service kind '" + kind + "' (expected exponential, weibull, deterministic, empirical)");
}

workload::PredictionModel parse_prediction(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "exact") return workload::PredictionModel::exact();
  if (kind == "exponential_mean") return workload::PredictionModel::exponential_mean();
  if (kind == "uniform_multiplicative") return workload::PredictionModel::uniform_multiplicative(get<double>(j, "alpha"));
  if (kind == "bounded_multiplicative") {
    return workload::PredictionModel::bounded_multiplicative(get<double>(j, "beta"), get<double>(j, "alpha"));
  }
  if (kind == "one_bit") {
    const json base = j.contains("base") ? j.at("base") : json{{"kind", "exponential_mean"}};
    return workload::PredictionModel::one_bit(get<double>(j, "threshold"), parse_prediction(base));
  }
  throw ConfigError("unknown prediction kind '" + kind +
                    "' (expected exact, exponential_mean, uniform_multiplicative, bounded_multiplicative, one_bit)");
}

policies::RankPolicy parse_policy(const json& j) {
  using policies::RankPolicy;
  const auto name = upper(get<std::string>(j, "name"));
  const double threshold = j.value("threshold", 1.0);
  const bool sprpt_long = j.value("sprpt_long", false);
  const bool lifo_short = j.value("lifo_short", false);
  if (name == "FIFO") return RankPolicy::fifo();
  if (name == "SJF") return RankPolicy::sjf();
  if (name == "PSJF") return RankPolicy::psjf();
  if (name == "SRPT") return RankPolicy::srpt();
  if (name == "SPJF") return RankPolicy::spjf();
  if (name == "PSPJF") return RankPolicy::pspjf();
  if (name == "SPRPT") return RankPolicy::sprpt();
  if (name == "SPRPT-BOUNCE") return RankPolicy::sprpt_bounce();
  if (name == "THRESHOLD-PREEMPT") return RankPolicy::two_class(true, true, threshold, sprpt_long, lifo_short);
  if (name == "THRESHOLD-NO-PREEMPT") return RankPolicy::two_class(false, true, threshold, sprpt_long, lifo_short);
  if (name == "PREDICTION-PREEMPT") return RankPolicy::two_class(true, false, threshold, sprpt_long, lifo_short);
  if (name == "PREDICTION-NO-PREEMPT") return RankPolicy::two_class(false, false, threshold, sprpt_long, lifo_short);
  if (name == "TRAIL") return RankPolicy::trail(get<double>(j, "c"));
  if (name == "SKIP-PREDICT" || name == "DELAY-PREDICT") {
    const json cost = j.contains("cost") ? j.at("cost") : json{{"kind", "external"}};
    const auto cost_kind = cost.value("kind", std::string("external"));
    const double cheap = cost.value("cheap", 0.0);
    const double full = cost.value("full", 0.0);
    policies::CostModel model;
    if (cost_kind == "external") {
      model = policies::CostModel::external(cheap, full);
    } else if (cost_kind == "server_time") {
      model = policies::CostModel::server_time(cheap, full);
    } else {
      throw ConfigError("unknown cost kind '" + cost_kind + "' (expected external, server_time)");
    }
    if (name == "SKIP-PREDICT") return RankPolicy::skip_predict(model, threshold);
    return RankPolicy::delay_predict(model, get<double>(j, "limit"));
  }
  throw ConfigError("unknown policy '" + get<std::string>(j, "name") + "' (expected " + kPolicyNames + ")");
}

engine::RunControl parse_control(const json& j) {
  engine::RunControl c;
  c.warmup_jobs = j.value("warmup_jobs", c.warmup_jobs);
  c.measured_jobs = j.value("measured_jobs", c.measured_jobs);
  if (j.contains("max_sim_time") && !j.at("max_sim_time").is_null()) c.max_sim_time = j.at("max_sim_time").get<double>();
  c.max_in_system = j.value("max_in_system", c.max_in_system);
  c.validate();
  return c;
}

multiserver::ClusterConfig parse_cluster(const json& j) {
  multiserver::ClusterConfig c;
  c.n = get<std::size_t>(j, "servers");
  c.d = get<std::size_t>(j, "d");
  c.lambda_per_server = get<double>(j, "arrival_rate");
  c.preemptive = j.value("preemptive", false);
  c.prediction = workload::PredictionModel::one_bit(j.value("threshold", 1.0), workload::PredictionModel::exponential_mean());
  if (j.contains("service")) c.service = parse_service(j.at("service"));
  c.validate();
  return c;
}

llm::GpuConfig parse_gpu(const json& j) {
  llm::GpuConfig g;
  if (j.contains("kv_memory_gb") && !j.at("kv_memory_gb").is_null()) {
    g.kv_capacity = llm::GpuConfig::tokens_for_memory(j.at("kv_memory_gb").get<double>(),
                                                      j.value("bytes_per_token", g.bytes_per_token));
  } else {
    g.kv_capacity = j.value("kv_capacity", g.kv_capacity);
  }
  g.bytes_per_token = j.value("bytes_per_token", g.bytes_per_token);
  g.tpot = j.value("tpot", g.tpot);
  g.ttft_base = j.value("ttft_base", g.ttft_base);
  g.ttft_per_token = j.value("ttft_per_token", g.ttft_per_token);
  g.prefill_chunk = j.value("prefill_chunk", g.prefill_chunk);
  g.batch_limit = j.value("batch_limit", g.batch_limit);
  g.swap_seconds_per_gb = j.value("swap_seconds_per_gb", g.swap_seconds_per_gb);
  g.validate();
  return g;
}

llm::ClusterOrg parse_cluster_org(const json& llm_section) {
  const json& org = llm_section.at("organization");
  const llm::GpuConfig gpu = parse_gpu(llm_section.at("gpu"));
  const auto kind = get<std::string>(org, "kind");
  llm::ClusterOrg out;
  if (kind == "pooled") {
    out = llm::Pooled{get<std::size_t>(org, "gpus"), gpu};
  } else if (kind == "dedicated") {
    llm::Dedicated d;
    d.prefill.assign(get<std::size_t>(org, "prefill_gpus"), gpu);
    d.decode.assign(get<std::size_t>(org, "decode_gpus"), gpu);
    d.kv_transfer_seconds_per_gb = org.value("kv_transfer_seconds_per_gb", 0.0);
    out = d;
  } else {
    throw ConfigError("unknown organization '" + kind + "' (expected pooled, dedicated)");
  }
  llm::validate(out);
  return out;
}

llm::LlmPolicy parse_llm_policy(const json& j) {
  auto p = llm::LlmPolicy::from_name(get<std::string>(j, "name"), j.value("c", 0.5));
  const auto basis = j.value("basis", std::string("output"));
  if (basis == "output") {
    p.basis = llm::RankBasis::kOutputOnly;
  } else if (basis == "input_output") {
    p.basis = llm::RankBasis::kInputPlusOutput;
  } else {
    throw ConfigError("unknown rank basis '" + basis + "' (expected output, input_output)");
  }
  const auto age = j.value("trail_age", std::string("tokens"));
  if (age == "tokens") {
    p.trail_age = llm::TrailAge::kTokens;
  } else if (age == "seconds") {
    p.trail_age = llm::TrailAge::kSeconds;
  } else {
    throw ConfigError("unknown trail_age '" + age + "' (expected tokens, seconds)");
  }
  p.validate();
  return p;
}

llm::Strategies parse_strategies(const json& j) {
  llm::Strategies s;
  s.preemption = llm::memory_strategy_from_string(j.value("preemption", std::string("discard")));
  s.api = llm::memory_strategy_from_string(j.value("api", std::string("preserve")));
  return s;
}

llm::TokenDistribution parse_tokens(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "constant") return llm::TokenDistribution::constant(get<std::uint64_t>(j, "value"));
  if (kind == "uniform") return llm::TokenDistribution::uniform(get<std::uint64_t>(j, "lo"), get<std::uint64_t>(j, "hi"));
  if (kind == "bimodal") {
    return llm::TokenDistribution::bimodal(get<std::uint64_t>(j, "first"), get<std::uint64_t>(j, "second"),
                                           j.value("p_first", 0.5));
  }
  throw ConfigError("unknown token distribution '" + kind + "' (expected constant, uniform, bimodal)");
}

llm::LlmWorkloadConfig parse_llm_workload(const json& llm_section) {
  const json& w = llm_section.at("workload");
  llm::LlmWorkloadConfig c;
  c.input = parse_tokens(w.at("input"));
  c.output = parse_tokens(w.at("output"));
  c.prediction = parse_prediction(w.at("prediction"));
  c.api_probability = w.value("api_probability", 0.0);
  c.api_calls_per_request = w.value("api_calls_per_request", std::size_t{1});
  c.api_duration_mean = w.value("api_duration_mean", 1.0);
  if (w.contains("api_strategy") && !w.at("api_strategy").is_null()) {
    c.api_strategy = llm::memory_strategy_from_string(w.at("api_strategy").get<std::string>());
  }
  if (w.contains("arrival_rate") && !w.at("arrival_rate").is_null()) {
    c.arrival_rate = w.at("arrival_rate").get<double>();
  } else {
    const auto org = parse_cluster_org(llm_section);
    const llm::GpuConfig gpu = parse_gpu(llm_section.at("gpu"));
    std::size_t gpus = 1;
    if (const auto* p = std::get_if<llm::Pooled>(&org)) gpus = p->gpus;
    if (const auto* d = std::get_if<llm::Dedicated>(&org)) gpus = d->decode.size();
    c.arrival_rate = llm::arrival_rate_for_load(get<double>(w, "load"), c.input, c.output, gpu, gpus);
  }
  c.validate();
  return c;
}

void validate_config(const json& config) {
  const auto scenario = get<std::string>(config, "scenario");
  const auto format = get<std::string>(config, "format");
  if (format != "csv" && format != "json") throw ConfigError("unknown format '" + format + "' (expected csv, json)");
  if (scenario == "single_queue") {
    parse_control(config.at("control"));
    const json& w = config.at("workload");
    if (!(w.contains("trace") && !w.at("trace").is_null())) {
      parse_service(w.at("service"));
      parse_prediction(w.at("prediction"));
      if (!(get<double>(w, "arrival_rate") > 0.0)) throw ConfigError("arrival_rate must be > 0");
    }
    parse_policy(config.at("policy"));
  } else if (scenario == "multiserver") {
    parse_control(config.at("control"));
    parse_cluster(config.at("cluster"));
  } else if (scenario == "llm") {
    const json& l = config.at("llm");
    parse_cluster_org(l);
    parse_llm_policy(l.at("policy"));
    parse_strategies(l.at("strategies"));
    const json& w = l.at("workload");
    if (!(w.contains("trace") && !w.at("trace").is_null())) {
      parse_llm_workload(l);
      if (get<std::size_t>(w, "requests") == 0) throw ConfigError("llm.workload.requests must be > 0");
    }
  } else if (scenario == "analytic") {
    get<std::string>(config.at("analytic"), "formula");
  } else {
    throw ConfigError("unknown scenario '" + scenario + "' (expected single_queue, multiserver, llm, analytic)");
  }
}

}  // namespace predq::cli

#include "predq/llmserve/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "detail/csv.hpp"
#include "predq/error.hpp"

namespace predq::llm {

TokenDistribution TokenDistribution::constant(std::uint64_t value) {
  return {Kind::kConstant, value, value, 1.0};
}

TokenDistribution TokenDistribution::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw ConfigError("uniform token range needs lo <= hi");
  return {Kind::kUniform, lo, hi, 0.5};
}

TokenDistribution TokenDistribution::bimodal(std::uint64_t first, std::uint64_t second, double p_first) {
  if (!(p_first >= 0.0 && p_first <= 1.0)) throw ConfigError("bimodal weight must lie in [0, 1]");
  return {Kind::kBimodal, first, second, p_first};
}

std::uint64_t TokenDistribution::sample(engine::RngStream& rng) const {
  switch (kind) {
    case Kind::kConstant:
      return a;
    case Kind::kUniform:
      return a + rng.index(b - a + 1);
    case Kind::kBimodal:
      return rng.bernoulli(p_first) ? a : b;
  }
  return a;
}

double TokenDistribution::mean() const {
  switch (kind) {
    case Kind::kConstant:
      return static_cast<double>(a);
    case Kind::kUniform:
      return 0.5 * static_cast<double>(a + b);
    case Kind::kBimodal:
      return p_first * static_cast<double>(a) + (1.0 - p_first) * static_cast<double>(b);
  }
  return 0.0;
}

std::string TokenDistribution::name() const {
  switch (kind) {
    case Kind::kConstant:
      return "constant(" + std::to_string(a) + ")";
    case Kind::kUniform:
      return "uniform(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case Kind::kBimodal:
      return "bimodal(" + std::to_string(a) + "," + std::to_string(b) + ")";
  }
  return "?";
}

void LlmWorkloadConfig::validate() const {
  if (!(arrival_rate > 0.0)) throw ConfigError("arrival_rate must be > 0");
  if (!(api_probability >= 0.0 && api_probability <= 1.0)) throw ConfigError("api_probability must lie in [0, 1]");
  if (!(api_duration_mean >= 0.0)) throw ConfigError("api_duration_mean must be >= 0");
  if (prediction.kind() == workload::PredictionModel::Kind::kOneBit) {
    throw ConfigError("LLM predictions must be token-valued; one-bit models are not supported");
  }
}

std::vector<LlmRequest> generate_llm_workload(const LlmWorkloadConfig& config, std::size_t count, std::uint64_t seed) {
  config.validate();
  engine::RngStream arrivals(seed, engine::Stream::kArrivals);
  engine::RngStream shape(seed, engine::Stream::kLlmShape);
  engine::RngStream prediction(seed, engine::Stream::kPrediction);
  engine::RngStream api(seed, engine::Stream::kApiCalls);

  std::vector<LlmRequest> out;
  out.reserve(count);
  double t = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    t += arrivals.exponential(1.0 / config.arrival_rate);
    LlmRequest r;
    r.id = i;
    r.arrival_time = t;
    r.n_input = config.input.sample(shape);
    r.n_output = config.output.sample(shape);
    r.predicted_output = config.prediction.predict(static_cast<double>(r.n_output), prediction).predicted_size;
    if (config.api_probability > 0.0 && api.bernoulli(config.api_probability) && r.n_output > 1) {
      // Distinct triggers in [1, n_output - 1].
      const std::size_t calls = std::min<std::size_t>(config.api_calls_per_request, r.n_output - 1);
      std::set<std::uint64_t> triggers;
      while (triggers.size() < calls) triggers.insert(1 + api.index(r.n_output - 1));
      for (std::uint64_t trigger : triggers) {
        r.api_calls.push_back({trigger, api.exponential(config.api_duration_mean), config.api_strategy});
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::vector<ApiCall> parse_api_calls(std::string_view cell, const std::string& name, std::size_t line_no) {
  std::vector<ApiCall> calls;
  if (detail::trim(cell).empty()) return calls;
  for (auto item : detail::split(cell, ';')) {
    if (item.empty()) continue;
    const auto parts = detail::split(item, ':');
    if (parts.size() < 2 || parts.size() > 3) {
      throw TraceError(name, line_no, "API call must be trigger:duration[:strategy]");
    }
    const auto trigger = detail::parse_uint(parts[0]);
    const auto duration = detail::parse_double(parts[1]);
    if (!trigger || !duration || *duration < 0.0) throw TraceError(name, line_no, "invalid API call");
    ApiCall call{*trigger, *duration, std::nullopt};
    if (parts.size() == 3) {
      try {
        call.strategy = memory_strategy_from_string(std::string(parts[2]));
      } catch (const ConfigError& e) {
        throw TraceError(name, line_no, e.what());
      }
    }
    calls.push_back(call);
  }
  return calls;
}

}  // namespace

std::vector<LlmRequest> load_llm_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  const std::string name = path.string();
  if (!in) throw TraceError(name, 0, "cannot open trace file");

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) break;
  }
  if (line_no == 0 || detail::trim(line).empty()) throw TraceError(name, line_no, "missing header");
  const auto header = detail::split(line, ',');
  const std::size_t width = header.size();
  const int col_arrival = detail::column_index(header, "arrival_time");
  const int col_input = detail::column_index(header, "n_input");
  const int col_output = detail::column_index(header, "n_output");
  const int col_pred = detail::column_index(header, "predicted_output");
  const int col_api = detail::column_index(header, "api_calls");
  if (col_arrival < 0 || col_input < 0 || col_output < 0) {
    throw TraceError(name, line_no, "header must contain arrival_time, n_input and n_output");
  }

  std::vector<LlmRequest> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != width) {
      throw TraceError(name, line_no,
                       "expected " + std::to_string(width) + " columns, found " + std::to_string(cells.size()));
    }
    LlmRequest r;
    r.id = out.size();
    const auto arrival = detail::parse_double(cells[col_arrival]);
    if (!arrival || *arrival < 0.0) throw TraceError(name, line_no, "invalid arrival_time");
    if (!out.empty() && *arrival < out.back().arrival_time) throw TraceError(name, line_no, "arrival_time decreases");
    const auto n_input = detail::parse_uint(cells[col_input]);
    const auto n_output = detail::parse_uint(cells[col_output]);
    if (!n_input || !n_output) throw TraceError(name, line_no, "token counts must be non-negative integers");
    if (*n_input == 0) throw TraceError(name, line_no, "n_input must be > 0");
    r.arrival_time = *arrival;
    r.n_input = *n_input;
    r.n_output = *n_output;
    if (col_pred >= 0 && !cells[col_pred].empty()) {
      const auto pred = detail::parse_double(cells[col_pred]);
      if (!pred || *pred < 0.0) throw TraceError(name, line_no, "invalid predicted_output");
      r.predicted_output = *pred;
    }
    if (col_api >= 0) r.api_calls = parse_api_calls(cells[col_api], name, line_no);
    try {
      r.validate();
    } catch (const ConfigError& e) {
      throw TraceError(name, line_no, e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

double arrival_rate_for_load(double rho, const TokenDistribution& input, const TokenDistribution& output,
                             const GpuConfig& gpu, std::size_t gpus) {
  if (!(rho > 0.0)) throw ConfigError("load must be > 0");
  // Expected busy time of one request served alone; exact when every prompt fits one chunk.
  const double service = gpu.ttft(static_cast<std::uint64_t>(std::llround(input.mean()))) + output.mean() * gpu.tpot;
  // Decode iterations take tpot whatever the batch size, so a GPU holds as
  // many requests at once as its batch limit and memory allow.
  const double slots = std::max(
      1.0, std::min(static_cast<double>(gpu.batch_limit),
                    static_cast<double>(gpu.kv_capacity) / (input.mean() + output.mean())));
  return rho * static_cast<double>(gpus) * slots / service;
}

}  // namespace predq::llm

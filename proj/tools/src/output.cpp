#include "predq/cli/output.hpp"

#include <fmt/format.h>

#include "predq/error.hpp"

namespace predq::cli {

using nlohmann::json;

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw ConfigError("unknown format '" + name + "' (expected csv, json)");
}

json to_json(const metrics::Metrics& m) {
  json j{{"count", m.count}, {"mean", m.mean}, {"ci_half_width", m.ci_half_width}, {"p50", m.p50},
         {"p90", m.p90},     {"p99", m.p99},   {"throughput", m.throughput}};
  if (m.cost_total) j["cost_total"] = *m.cost_total;
  if (m.memory_waste) j["memory_waste"] = *m.memory_waste;
  return j;
}

json to_json(const TableCell& c) {
  json j{{"table", c.table},
         {"lambda", c.lambda},
         {"column", c.column},
         {"value", c.value},
         {"ci_half_width", c.ci_half_width},
         {"reference", c.reference ? json(*c.reference) : json(nullptr)},
         {"rel_error", c.rel_error},
         {"tolerance", c.tolerance},
         {"within", c.within},
         {"analytic", c.analytic},
         {"threshold", c.threshold ? json(*c.threshold) : json(nullptr)},
         {"jobs", c.jobs}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json to_json(const llm::LlmResult& r) {
  const auto& k = r.counters;
  json records = json::array();
  for (const auto& rec : r.records) {
    const auto l = llm::request_latency(rec);
    records.push_back({{"id", rec.id},
                       {"arrival", rec.arrival},
                       {"t_waiting", l.t_waiting},
                       {"ttft", l.ttft},
                       {"decode_time", l.decode_time},
                       {"t_response", l.t_response},
                       {"preemptions", rec.preemptions}});
  }
  return json{{"latency", to_json(r.latency)},
              {"ttft", to_json(r.ttft)},
              {"token_throughput", r.token_throughput},
              {"memory_waste",
               {{"total", r.waste.total()},
                {"api_preserve", r.waste.api_preserve},
                {"idle_resident", r.waste.idle_resident},
                {"swap", r.waste.swap},
                {"recompute", r.waste.recompute}}},
              {"counters",
               {{"iterations", k.iterations},
                {"decode_steps", k.decode_steps},
                {"prefill_tokens", k.prefill_tokens},
                {"preemptions", k.preemptions},
                {"discards", k.discards},
                {"swap_outs", k.swap_outs},
                {"swap_ins", k.swap_ins},
                {"api_calls", k.api_calls},
                {"recompute_tokens", k.recompute_tokens},
                {"forced_discards", k.forced_discards},
                {"kv_transfers", k.kv_transfers},
                {"rejected", k.rejected}}},
              {"rejected_ids", r.rejected_ids},
              {"peak_kv_tokens", r.peak_kv_tokens},
              {"end_time", r.end_time},
              {"records", records}};
}

void write_cells(std::ostream& out, const std::vector<TableCell>& cells, Format format) {
  if (format == Format::kJson) {
    json arr = json::array();
    for (const auto& c : cells) arr.push_back(to_json(c));
    out << arr.dump(2) << '\n';
    return;
  }
  out << "table,lambda,column,value,ci_half_width,reference,rel_error,tolerance,within,analytic,threshold,jobs,note\n";
  for (const auto& c : cells) {
    out << fmt::format("{},{},{},{:.6f},{:.6f},{},{:.5f},{:.5f},{},{},{},{},{}\n", c.table, c.lambda, c.column, c.value,
                       c.ci_half_width, c.reference ? fmt::format("{}", *c.reference) : std::string(), c.rel_error,
                       c.tolerance, c.within ? "yes" : "no", c.analytic ? "yes" : "no",
                       c.threshold ? fmt::format("{:.4f}", *c.threshold) : std::string(), c.jobs, c.note);
  }
}

namespace {

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
    return;
  }
  if (j.is_array()) return;  // per-record arrays do not fit one row
  out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
}

}  // namespace

void write_flat_csv(std::ostream& out, const json& object) {
  std::vector<std::pair<std::string, std::string>> kv;
  flatten(object, "", kv);
  for (std::size_t i = 0; i < kv.size(); ++i) out << (i ? "," : "") << kv[i].first;
  out << '\n';
  for (std::size_t i = 0; i < kv.size(); ++i) out << (i ? "," : "") << kv[i].second;
  out << '\n';
}

}  // namespace predq::cli

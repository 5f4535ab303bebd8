#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "predq/cli/tables.hpp"
#include "predq/llmserve/simulator.hpp"
#include "predq/metrics/summary.hpp"

namespace predq::cli {

enum class Format { kCsv, kJson };

Format parse_format(const std::string& name);

nlohmann::json to_json(const metrics::Metrics& m);
nlohmann::json to_json(const TableCell& cell);
nlohmann::json to_json(const llm::LlmResult& r);

void write_cells(std::ostream& out, const std::vector<TableCell>& cells, Format format);

/// A flat key/value view of a JSON object for CSV output: nested keys are
/// joined with dots, one header row and one value row.
void write_flat_csv(std::ostream& out, const nlohmann::json& object);

}  // namespace predq::cli

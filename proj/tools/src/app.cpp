#include "predq/cli/app.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "predq/analytic/formulas.hpp"
#include "predq/cli/config.hpp"
#include "predq/cli/output.hpp"
#include "predq/cli/tables.hpp"
#include "predq/error.hpp"
#include "predq/llmserve/simulator.hpp"
#include "predq/llmserve/workload.hpp"
#include "predq/metrics/summary.hpp"
#include "predq/multiserver/cluster.hpp"
#include "predq/policies/single_queue.hpp"
#include "predq/policies/stability.hpp"
#include "predq/workload/source.hpp"

namespace predq::cli {

namespace {

json stats_json(const policies::QueueRunStats& s) {
  return json{{"end_time", s.end_time},
              {"busy_time", s.busy_time},
              {"completed_work", s.completed_work},
              {"arrivals", s.arrivals},
              {"departures", s.departures},
              {"peak_in_system", s.peak_in_system},
              {"full_predictions", s.full_predictions},
              {"preemptions", s.preemptions}};
}

std::uint64_t config_seed(const json& config) {
  if (!config.contains("seed") || config.at("seed").is_null()) throw ConfigError("a seed is required (--seed)");
  return config.at("seed").get<std::uint64_t>();
}

bool has(const json& j, const char* key) { return j.contains(key) && !j.at(key).is_null(); }

json run_single_queue(const json& config) {
  const auto control = parse_control(config.at("control"));
  const json& w = config.at("workload");
  const auto policy = parse_policy(config.at("policy"));
  policies::SingleQueueResult result;
  if (has(w, "trace")) {
    workload::TraceJobSource source(workload::load_trace(w.at("trace").get<std::string>()));
    result = policies::simulate_single_queue(source, policy, control);
  } else {
    auto prediction = parse_prediction(w.at("prediction"));
    const bool needs_bit = policy.kind() == policies::PolicyKind::kTwoClass && !policy.use_oracle();
    if (needs_bit && prediction.kind() != workload::PredictionModel::Kind::kOneBit) {
      prediction = workload::PredictionModel::one_bit(policy.threshold(), prediction);
    }
    const double rate = w.at("arrival_rate").get<double>();
    const auto service = parse_service(w.at("service"));
    policies::require_stable(rate, service, prediction, policy);
    workload::PoissonJobGenerator source(rate, service, prediction, config_seed(config));
    result = policies::simulate_single_queue(source, policy, control);
  }
  if (result.records.empty()) throw ConfigError("no measured jobs completed (trace shorter than warm-up?)");
  return json{{"policy", policy.name()}, {"metrics", to_json(metrics::summarize(result.records))},
              {"stats", stats_json(result.stats)}};
}

json run_multiserver(const json& config) {
  const auto control = parse_control(config.at("control"));
  const auto cluster = parse_cluster(config.at("cluster"));
  const auto result = multiserver::simulate_cluster(cluster, control, config_seed(config));
  return json{{"metrics", to_json(result.metrics)}, {"stats", stats_json(result.stats)}};
}

json run_llm(const json& config) {
  const json& l = config.at("llm");
  const json& w = l.at("workload");
  std::vector<llm::LlmRequest> requests;
  engine::RunControl control;
  if (has(w, "trace")) {
    requests = llm::load_llm_trace(w.at("trace").get<std::string>());
    if (requests.empty()) throw ConfigError("LLM trace is empty");
    control.measured_jobs = requests.size();
  } else {
    const auto count = w.at("requests").get<std::uint64_t>();
    const auto warmup = w.value("warmup", std::uint64_t{0});
    requests = llm::generate_llm_workload(parse_llm_workload(l), count + warmup, config_seed(config));
    control.warmup_jobs = warmup;
    control.measured_jobs = count;
  }
  control.max_in_system = std::max<std::uint64_t>(requests.size(), 1);
  const auto result = llm::simulate_llm(std::move(requests), parse_cluster_org(l), parse_llm_policy(l.at("policy")),
                                        parse_strategies(l.at("strategies")), control);
  return to_json(result);
}

json run_analytic(const json& config) {
  const json& a = config.at("analytic");
  const auto formula = a.at("formula").get<std::string>();
  return json{{"formula", formula}, {"value", evaluate_formula(formula, a)}};
}

void emit(const json& payload, Format format, std::ostream& out) {
  if (format == Format::kJson) {
    out << payload.dump(2) << '\n';
  } else {
    write_flat_csv(out, payload);
  }
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> jobs;
  std::string format = "csv";
  std::string out_path;
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c, bool with_config) {
  cmd->add_option("--seed", c.seed, "Random seed (u64)");
  cmd->add_option("--jobs", c.jobs, "Measured jobs (requests for llm)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", c.out_path, "Write results to this file instead of stdout");
  if (with_config) {
    cmd->add_option("--config", c.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--set", c.overrides, "Override a config key: a.b.c=value (repeatable)");
  }
}

json load_config(const Common& c) {
  json user = json::object();
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    user = json::parse(in, nullptr, false);
    if (user.is_discarded()) throw ConfigError("config file is not valid JSON: " + c.config_path);
  }
  json config = effective_config(user);
  for (const auto& o : c.overrides) apply_override(config, o);
  if (c.seed) config["seed"] = *c.seed;
  if (c.format != "csv" || !config.contains("format")) config["format"] = c.format;
  return config;
}

std::vector<double> grid(double from, double to, std::size_t points, bool log_scale) {
  if (points < 2) throw ConfigError("a sweep needs at least two points");
  if (log_scale && !(from > 0.0 && to > 0.0)) throw ConfigError("log sweep bounds must be > 0");
  std::vector<double> out;
  for (std::size_t i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    out.push_back(log_scale ? std::exp(std::log(from) + f * (std::log(to) - std::log(from))) : from + f * (to - from));
  }
  return out;
}

}  // namespace

std::vector<std::string> formula_names() {
  return {"mm1_fifo", "mg1_fifo_pk", "onebit_t1", "onebit_t2", "onebit_optimum", "bessel_k"};
}

double evaluate_formula(const std::string& formula, const json& p) {
  const auto num = [&](const char* key, double fallback) { return p.contains(key) ? p.at(key).get<double>() : fallback; };
  const double lambda = num("lambda", 0.5);
  if (formula == "mm1_fifo") return analytic::mm1_fifo(lambda).mean_response;
  if (formula == "mg1_fifo_pk") return analytic::mg1_fifo_pk(lambda, num("mean", 1.0), num("second_moment", 2.0)).mean_response;
  if (formula == "onebit_t1") return analytic::onebit_t1(lambda, num("threshold", 1.0)).mean_response;
  if (formula == "onebit_t2") return analytic::onebit_t2(lambda, num("threshold", 1.0)).mean_response;
  if (formula == "onebit_optimum") return analytic::optimal_onebit_threshold(lambda).threshold;
  if (formula == "bessel_k") return analytic::bessel_k(static_cast<int>(num("nu", 1.0)), num("x", 1.0));
  std::string names;
  for (const auto& n : formula_names()) names += (names.empty() ? "" : ", ") + n;
  throw ConfigError("unknown formula '" + formula + "' (expected " + names + ")");
}

json run_scenario(const json& config) {
  validate_config(config);
  const auto scenario = config.at("scenario").get<std::string>();
  if (scenario == "single_queue") return run_single_queue(config);
  if (scenario == "multiserver") return run_multiserver(config);
  if (scenario == "llm") return run_llm(config);
  return run_analytic(config);
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"predq: queueing and LLM-serving simulation with predictions"};
  app.require_subcommand(1);

  Common c;
  TableOptions table_opts;
  std::vector<double> lambdas;
  std::vector<std::string> columns;
  std::uint64_t probe_jobs = table_opts.probe_jobs;
  bool with_analytic = false;

  auto* t1 = app.add_subcommand("table1", "Seven policies with exponential predictions, M/M/1");
  auto* t2 = app.add_subcommand("table2", "One-bit policies with threshold sweeps, exponential service");
  auto* t3 = app.add_subcommand("table3", "One-bit policies with threshold sweeps, Weibull service");
  for (auto* t : {t1, t2, t3}) {
    add_common(t, c, false);
    t->add_option("--lambda", lambdas, "Restrict to these arrival rates");
    t->add_option("--column", columns, "Restrict to these columns");
  }
  for (auto* t : {t2, t3}) t->add_option("--probe-jobs", probe_jobs, "Measured jobs per threshold probe");
  t2->add_flag("--with-analytic", with_analytic, "Add analytic one-bit cells at the optimal threshold");

  auto* sim = app.add_subcommand("simulate", "Run one simulation from a config");
  add_common(sim, c, true);
  std::string dump_path;
  sim->add_option("--dump-config", dump_path, "Write the effective config to this file");

  auto* llm_cmd = app.add_subcommand("llm", "Run the LLM serving simulator");
  add_common(llm_cmd, c, true);
  std::string trace_path;
  llm_cmd->add_option("--trace", trace_path, "LLM request trace (CSV)")->check(CLI::ExistingFile);
  llm_cmd->add_option("--dump-config", dump_path, "Write the effective config to this file");

  auto* an = app.add_subcommand("analytic", "Evaluate a closed-form expression");
  std::string formula;
  json params = json::object();
  std::optional<double> a_lambda, a_t, a_mean, a_second, a_nu, a_x;
  an->add_option("formula", formula, "Formula name")->required();
  an->add_option("--lambda", a_lambda);
  an->add_option("--T,--threshold", a_t);
  an->add_option("--mean", a_mean);
  an->add_option("--second-moment", a_second);
  an->add_option("--nu", a_nu);
  an->add_option("--x", a_x);
  an->add_option("--format", c.format)->check(CLI::IsMember({"csv", "json"}));
  an->add_option("--out", c.out_path);

  auto* sw = app.add_subcommand("sweep", "Evaluate a formula or a simulation over a parameter grid");
  add_common(sw, c, true);
  std::string sweep_formula;
  std::string sweep_param;
  std::vector<double> values;
  double from = 0.0, to = 0.0;
  std::size_t points = 0;
  bool log_scale = false;
  sw->add_option("--formula", sweep_formula, "Closed-form expression to sweep");
  sw->add_option("--param", sweep_param, "Swept parameter (formula argument or config key path)")->required();
  sw->add_option("--values", values, "Explicit grid values");
  sw->add_option("--from", from);
  sw->add_option("--to", to);
  sw->add_option("--points", points);
  sw->add_flag("--log", log_scale, "Geometric grid");
  sw->add_option("--lambda", a_lambda);
  sw->add_option("--T,--threshold", a_t);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.out_path.empty()) {
    file.open(c.out_path);
    if (!file) {
      err << "error: cannot open output file " << c.out_path << '\n';
      return kExitFailure;
    }
    sink = &file;
  }

  try {
    const Format format = parse_format(c.format);
    if (t1->parsed() || t2->parsed() || t3->parsed()) {
      if (!c.seed) throw ConfigError("--seed is required for simulation commands");
      table_opts.seed = *c.seed;
      if (c.jobs) table_opts.measured_jobs = *c.jobs;
      table_opts.probe_jobs = probe_jobs;
      table_opts.lambdas = lambdas;
      table_opts.columns = columns;
      table_opts.threads = thread_budget();
      std::vector<TableCell> cells;
      if (t1->parsed()) {
        cells = run_table1(table_opts);
      } else {
        const int table = t2->parsed() ? 2 : 3;
        cells = run_table23(table, table_opts);
        if (table == 2 && with_analytic) {
          std::vector<TableCell> extra;
          for (const auto& cell : cells) {
            if (cell.column == "PREDICTION-PREEMPT" || cell.column == "PREDICTION-NO-PREEMPT") {
              extra.push_back(onebit_analytic_cell(cell.lambda, cell.column == "PREDICTION-PREEMPT", cell));
            }
          }
          cells.insert(cells.end(), extra.begin(), extra.end());
        }
      }
      write_cells(*sink, cells, format);
      std::size_t failed = 0;
      for (const auto& cell : cells) failed += cell.reference && !cell.within ? 1 : 0;
      err << fmt::format("{} cells, {} outside tolerance\n", cells.size(), failed);
      return kExitOk;
    }

    if (an->parsed()) {
      if (a_lambda) params["lambda"] = *a_lambda;
      if (a_t) params["threshold"] = *a_t;
      if (a_mean) params["mean"] = *a_mean;
      if (a_second) params["second_moment"] = *a_second;
      if (a_nu) params["nu"] = *a_nu;
      if (a_x) params["x"] = *a_x;
      const double value = evaluate_formula(formula, params);
      if (format == Format::kJson) {
        *sink << json{{"formula", formula}, {"parameters", params}, {"value", value}}.dump(2) << '\n';
      } else {
        *sink << "formula,value\n" << formula << ',' << fmt::format("{:.17g}", value) << '\n';
      }
      return kExitOk;
    }

    if (sim->parsed() || llm_cmd->parsed()) {
      json config = load_config(c);
      if (llm_cmd->parsed()) {
        config["scenario"] = "llm";
        if (!trace_path.empty()) config["llm"]["workload"]["trace"] = trace_path;
        if (c.jobs) config["llm"]["workload"]["requests"] = *c.jobs;
      } else if (c.jobs) {
        config["control"]["measured_jobs"] = *c.jobs;
      }
      const bool needs_seed = config.at("scenario") != "analytic";
      if (needs_seed && !c.seed) throw ConfigError("--seed is required for simulation commands");
      validate_config(config);
      if (!dump_path.empty()) {
        std::ofstream dump(dump_path);
        if (!dump) throw ConfigError("cannot write config to " + dump_path);
        dump << config.dump(2) << '\n';
      }
      json result = run_scenario(config);
      if (format == Format::kJson) result["config"] = config;
      emit(result, format, *sink);
      return kExitOk;
    }

    if (sw->parsed()) {
      json rows = json::array();
      std::vector<double> grid_values = values;
      if (grid_values.empty()) grid_values = grid(from, to, points, log_scale);
      std::size_t best = 0;
      if (!sweep_formula.empty()) {
        json p = json::object();
        if (a_lambda) p["lambda"] = *a_lambda;
        if (a_t) p["threshold"] = *a_t;
        const std::string key = sweep_param == "T" ? "threshold" : sweep_param;
        for (double v : grid_values) {
          p[key] = v;
          rows.push_back({{"param", v}, {"value", evaluate_formula(sweep_formula, p)}});
        }
      } else {
        if (!c.seed) throw ConfigError("--seed is required for simulation commands");
        const json base = load_config(c);
        for (double v : grid_values) {
          json config = base;
          apply_override(config, sweep_param + "=" + fmt::format("{:.17g}", v));
          if (c.jobs) config["control"]["measured_jobs"] = *c.jobs;
          const json result = run_scenario(config);
          const double value = result.contains("metrics") ? result.at("metrics").at("mean").get<double>()
                               : result.contains("latency") ? result.at("latency").at("mean").get<double>()
                                                            : result.at("value").get<double>();
          rows.push_back({{"param", v}, {"value", value}});
        }
      }
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i]["value"].get<double>() < rows[best]["value"].get<double>()) best = i;
      }
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i]["minimum"] = i == best;
      if (format == Format::kJson) {
        *sink << rows.dump(2) << '\n';
      } else {
        *sink << sweep_param << ",value,minimum\n";
        for (const auto& r : rows) {
          *sink << fmt::format("{:.17g},{:.17g},{}\n", r["param"].get<double>(), r["value"].get<double>(),
                               r["minimum"].get<bool>() ? "*" : "");
        }
      }
      return kExitOk;
    }
  } catch (const TraceError& e) {
    err << "trace error: " << e.what() << '\n';
    return kExitTrace;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InstabilityError& e) {
    err << "instability: " << e.what() << '\n';
    return kExitInstability;
  } catch (const NonTerminationError& e) {
    err << "non-termination: " << e.what() << '\n';
    return kExitInstability;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace predq::cli

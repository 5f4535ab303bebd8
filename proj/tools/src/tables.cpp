#include "predq/cli/tables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "predq/analytic/formulas.hpp"
#include "predq/error.hpp"
#include "predq/metrics/summary.hpp"
#include "predq/policies/single_queue.hpp"
#include "predq/policies/threshold_search.hpp"
#include "predq/workload/source.hpp"

namespace predq::cli {

namespace {

using workload::PredictionModel;
using workload::ServiceDistribution;

constexpr std::array<double, 8> kTable1Lambdas{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99};
constexpr std::array<double, 7> kTable23Lambdas{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98};

// Rows follow kTable1Lambdas; columns FIFO, SJF, SPJF, PSJF, PSPJF, SRPT, SPRPT.
constexpr double kTable1[8][7] = {
    {2.0000, 1.7127, 1.7948, 1.5314, 1.6636, 1.4254, 1.6531},
    {2.5000, 1.9625, 2.1086, 1.7526, 1.9527, 1.6041, 1.9305},
    {3.3333, 2.3122, 2.5726, 2.0839, 2.3970, 1.8746, 2.3539},
    {5.0000, 2.8822, 3.3758, 2.6589, 3.1943, 2.3528, 3.1168},
    {10.0000, 4.1969, 5.3610, 4.0518, 5.2232, 3.5521, 5.0481},
    {20.0000, 6.2640, 8.6537, 6.2648, 8.6166, 5.5410, 8.3221},
    {50.0000, 11.2849, 16.9502, 11.5513, 17.1090, 10.4947, 16.6239},
    {100.0000, 18.4507, 29.0536, 18.9556, 29.3783, 17.6269, 28.7302},
};

// Columns FIFO, THRESHOLD-NO-PREEMPT, THRESHOLD-PREEMPT, SRPT,
// PREDICTION-NO-PREEMPT, PREDICTION-PREEMPT, SPRPT.
constexpr double kTable2[7][7] = {
    {2.000, 1.783, 1.564, 1.425, 1.850, 1.698, 1.659},
    {2.500, 2.089, 1.814, 1.604, 2.209, 2.013, 1.940},
    {3.333, 2.542, 2.203, 1.875, 2.761, 2.517, 2.369},
    {5.000, 3.329, 2.910, 2.355, 3.757, 3.451, 3.143},
    {10.00, 5.278, 4.755, 3.552, 6.366, 5.960, 5.097},
    {20.00, 8.535, 7.914, 5.532, 10.848, 10.372, 8.424},
    {50.00, 16.495, 15.735, 10.436, 22.418, 21.909, 16.696},
};

constexpr double kTable3[7][7] = {
    {4.000, 3.012, 1.608, 1.411, 3.155, 1.736, 1.940},
    {5.500, 3.676, 1.867, 1.574, 3.918, 2.062, 2.280},
    {8.000, 4.565, 2.258, 1.813, 4.983, 2.568, 2.750},
    {13.00, 5.955, 2.951, 2.217, 6.721, 3.481, 3.519},
    {29.00, 8.940, 4.649, 3.154, 10.630, 5.790, 5.224},
    {58.00, 13.223, 7.448, 4.517, 16.546, 9.846, 7.788},
    {148.0, 22.451, 15.194, 7.666, 29.346, 20.918, 13.404},
};

const std::vector<std::string> kTable1Columns{"FIFO", "SJF", "SPJF", "PSJF", "PSPJF", "SRPT", "SPRPT"};
const std::vector<std::string> kTable23Columns{"FIFO",
                                               "THRESHOLD-NO-PREEMPT",
                                               "THRESHOLD-PREEMPT",
                                               "SRPT",
                                               "PREDICTION-NO-PREEMPT",
                                               "PREDICTION-PREEMPT",
                                               "SPRPT"};

template <std::size_t N>
int row_of(const std::array<double, N>& lambdas, double lambda) {
  for (std::size_t i = 0; i < N; ++i) {
    if (std::abs(lambdas[i] - lambda) < 1e-9) return static_cast<int>(i);
  }
  return -1;
}

int column_of(const std::vector<std::string>& columns, const std::string& name) {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::string table_name(int table) { return "table" + std::to_string(table); }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

policies::RankPolicy table1_policy(const std::string& column) {
  using policies::RankPolicy;
  if (column == "FIFO") return RankPolicy::fifo();
  if (column == "SJF") return RankPolicy::sjf();
  if (column == "SPJF") return RankPolicy::spjf();
  if (column == "PSJF") return RankPolicy::psjf();
  if (column == "PSPJF") return RankPolicy::pspjf();
  if (column == "SRPT") return RankPolicy::srpt();
  if (column == "SPRPT") return RankPolicy::sprpt();
  throw ConfigError("unknown table1 column '" + column + "'");
}

metrics::Metrics simulate(double lambda, const ServiceDistribution& service, const PredictionModel& prediction,
                          const policies::RankPolicy& policy, const engine::RunControl& control, std::uint64_t seed) {
  workload::PoissonJobGenerator source(lambda, service, prediction, seed);
  const auto result = policies::simulate_single_queue(source, policy, control);
  return metrics::summarize(result.records);
}

engine::RunControl control_for(std::uint64_t measured) {
  engine::RunControl c;
  c.measured_jobs = measured;
  c.warmup_jobs = measured / 10;
  c.max_in_system = 1'000'000;
  return c;
}

void judge(TableCell& cell, double floor) {
  if (!cell.reference) return;
  cell.rel_error = (cell.value - *cell.reference) / *cell.reference;
  cell.tolerance = cell_tolerance(floor, cell.ci_half_width, *cell.reference);
  cell.within = std::abs(cell.rel_error) <= cell.tolerance;
}

template <typename Fn>
std::vector<TableCell> run_parallel(std::size_t count, unsigned threads, Fn fn) {
  std::vector<TableCell> out(count);
  std::size_t next = 0;
  std::mutex mu;
  std::exception_ptr error;
  auto worker = [&]() {
    while (true) {
      std::size_t k;
      {
        std::lock_guard lock(mu);
        if (next >= count || error) return;
        k = next++;
      }
      try {
        out[k] = fn(k);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

bool selected(const std::vector<double>& filter, double lambda) {
  return filter.empty() || std::any_of(filter.begin(), filter.end(), [&](double l) { return std::abs(l - lambda) < 1e-9; });
}

bool selected(const std::vector<std::string>& filter, const std::string& column) {
  return filter.empty() || std::find(filter.begin(), filter.end(), column) != filter.end();
}

}  // namespace

std::vector<double> table1_lambdas() { return {kTable1Lambdas.begin(), kTable1Lambdas.end()}; }
std::vector<std::string> table1_columns() { return kTable1Columns; }
std::vector<double> table23_lambdas() { return {kTable23Lambdas.begin(), kTable23Lambdas.end()}; }
std::vector<std::string> table23_columns() { return kTable23Columns; }

std::optional<double> table1_reference(double lambda, const std::string& column) {
  const int r = row_of(kTable1Lambdas, lambda);
  const int c = column_of(kTable1Columns, column);
  if (r < 0 || c < 0) return std::nullopt;
  return kTable1[r][c];
}

std::optional<double> table23_reference(int table, double lambda, const std::string& column) {
  const int r = row_of(kTable23Lambdas, lambda);
  const int c = column_of(kTable23Columns, column);
  if (r < 0 || c < 0 || (table != 2 && table != 3)) return std::nullopt;
  return table == 2 ? kTable2[r][c] : kTable3[r][c];
}

int table23_fifo_decimals(int table, double lambda) {
  if (table == 3 && lambda > 0.97) return 1;
  if (table == 3) return lambda < 0.75 ? 3 : 2;
  return lambda < 0.85 ? 3 : 2;
}

double cell_tolerance(double floor, double ci_half_width, double reference) {
  return std::max(floor, 3.0 * ci_half_width / std::abs(reference));
}

std::uint64_t row_seed(std::uint64_t seed, int table, double lambda) {
  const auto milli = static_cast<std::uint64_t>(std::llround(lambda * 1000.0));
  return splitmix(splitmix(seed ^ (static_cast<std::uint64_t>(table) << 32)) ^ milli);
}

TableCell table1_fifo_analytic(double lambda) {
  TableCell cell;
  cell.table = "table1";
  cell.lambda = lambda;
  cell.column = "FIFO";
  cell.analytic = true;
  cell.value = analytic::mm1_fifo(lambda).mean_response;
  cell.reference = table1_reference(lambda, "FIFO");
  if (cell.reference) {
    cell.rel_error = (cell.value - *cell.reference) / *cell.reference;
    cell.tolerance = 0.5e-4 / *cell.reference;
    cell.within = std::abs(cell.value - *cell.reference) <= 0.5e-4;
  }
  cell.note = "analytic M/M/1";
  return cell;
}

TableCell run_table1_cell(double lambda, const std::string& column, const TableOptions& options) {
  const bool heavy = lambda >= 0.975;
  const std::uint64_t measured = heavy ? 10 * options.measured_jobs : options.measured_jobs;
  const auto m = simulate(lambda, ServiceDistribution::exponential(1.0), PredictionModel::exponential_mean(),
                          table1_policy(column), control_for(measured), row_seed(options.seed, 1, lambda));
  TableCell cell;
  cell.table = "table1";
  cell.lambda = lambda;
  cell.column = column;
  cell.value = m.mean;
  cell.ci_half_width = m.ci_half_width;
  cell.jobs = measured;
  cell.reference = table1_reference(lambda, column);
  if (cell.reference) {
    if (heavy) {
      cell.rel_error = (cell.value - *cell.reference) / *cell.reference;
      cell.tolerance = 0.05;
      cell.within = std::abs(cell.rel_error) <= cell.tolerance;
    } else {
      judge(cell, 0.02);
    }
  }
  return cell;
}

std::vector<TableCell> run_table1(const TableOptions& options) {
  std::vector<std::pair<double, std::string>> tasks;
  for (double l : kTable1Lambdas) {
    if (!selected(options.lambdas, l)) continue;
    for (const auto& c : kTable1Columns) {
      if (selected(options.columns, c)) tasks.emplace_back(l, c);
    }
  }
  auto cells = run_parallel(tasks.size(), options.threads,
                            [&](std::size_t k) { return run_table1_cell(tasks[k].first, tasks[k].second, options); });
  std::vector<TableCell> out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (tasks[k].second == "FIFO") out.push_back(table1_fifo_analytic(tasks[k].first));
    out.push_back(std::move(cells[k]));
  }
  return out;
}

TableCell run_table23_cell(int table, double lambda, const std::string& column, const TableOptions& options) {
  if (table != 2 && table != 3) throw ConfigError("table must be 2 or 3");
  const ServiceDistribution service =
      table == 2 ? ServiceDistribution::exponential(1.0) : ServiceDistribution::weibull_half();
  TableCell cell;
  cell.table = table_name(table);
  cell.lambda = lambda;
  cell.column = column;
  cell.reference = table23_reference(table, lambda, column);
  const std::uint64_t seed = row_seed(options.seed, table, lambda);

  if (column == "FIFO") {
    const auto mom = workload::moments(service);
    cell.analytic = true;
    cell.value = analytic::mg1_fifo_pk(lambda, mom.mean, mom.second_moment).mean_response;
    cell.note = "analytic Pollaczek-Khinchine";
    if (cell.reference) {
      const double half_ulp = 0.5 * std::pow(10.0, -table23_fifo_decimals(table, lambda));
      cell.rel_error = (cell.value - *cell.reference) / *cell.reference;
      cell.tolerance = half_ulp / *cell.reference;
      cell.within = std::abs(cell.value - *cell.reference) <= half_ulp + 1e-12;
      if (table == 3 && std::abs(lambda - 0.9) < 1e-9) cell.note += "; excluded: printed value inconsistent with formula";
    }
    return cell;
  }

  const engine::RunControl control = control_for(options.measured_jobs);
  if (column == "SRPT" || column == "SPRPT") {
    const auto policy = column == "SRPT" ? policies::RankPolicy::srpt() : policies::RankPolicy::sprpt();
    const auto m = simulate(lambda, service, PredictionModel::exponential_mean(), policy, control, seed);
    cell.value = m.mean;
    cell.ci_half_width = m.ci_half_width;
    cell.jobs = options.measured_jobs;
    judge(cell, 0.03);
    return cell;
  }

  const bool oracle = column.rfind("THRESHOLD", 0) == 0;
  const bool preemptive = column.find("NO-PREEMPT") == std::string::npos;
  if (!oracle && column.rfind("PREDICTION", 0) != 0) {
    throw ConfigError("unknown table" + std::to_string(table) + " column '" + column + "'");
  }
  policies::ThresholdObjective objective = [&](double t, const engine::RunControl& c, std::uint64_t s) {
    // Preemptive columns put each new short job at the front of the short
    // class, displacing a running short job as well as a long one.
    const auto policy = policies::RankPolicy::two_class(preemptive, oracle, t, false, preemptive);
    const auto prediction = oracle ? PredictionModel::exponential_mean()
                                   : PredictionModel::one_bit(t, PredictionModel::exponential_mean());
    return simulate(lambda, service, prediction, policy, c, s);
  };
  policies::ThresholdSearchOptions search;
  search.probe = control_for(options.probe_jobs);
  search.final_run = control;
  const auto found = policies::optimize_threshold(objective, search, seed);
  cell.value = found.metrics.mean;
  cell.ci_half_width = found.metrics.ci_half_width;
  cell.threshold = found.threshold;
  cell.jobs = options.measured_jobs;
  judge(cell, 0.03);
  return cell;
}

std::vector<TableCell> run_table23(int table, const TableOptions& options) {
  std::vector<std::pair<double, std::string>> tasks;
  for (double l : kTable23Lambdas) {
    if (!selected(options.lambdas, l)) continue;
    for (const auto& c : kTable23Columns) {
      if (selected(options.columns, c)) tasks.emplace_back(l, c);
    }
  }
  return run_parallel(tasks.size(), options.threads,
                      [&](std::size_t k) { return run_table23_cell(table, tasks[k].first, tasks[k].second, options); });
}

TableCell onebit_analytic_cell(double lambda, bool preemptive, const TableCell& simulated) {
  const auto opt = analytic::optimal_onebit_threshold(lambda);
  TableCell cell;
  cell.table = "table2";
  cell.lambda = lambda;
  cell.column = preemptive ? "PREDICTION-PREEMPT" : "PREDICTION-NO-PREEMPT";
  cell.analytic = true;
  cell.value = preemptive ? opt.t2 : opt.t1;
  cell.threshold = opt.threshold;
  cell.reference = simulated.value;
  cell.rel_error = (cell.value - simulated.value) / simulated.value;
  cell.tolerance = cell_tolerance(0.03, simulated.ci_half_width, simulated.value);
  cell.within = std::abs(cell.rel_error) <= cell.tolerance;
  cell.note = preemptive ? "analytic t2 at optimal T vs simulation" : "analytic t1 at optimal T vs simulation";
  return cell;
}

unsigned thread_budget(unsigned requested) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PREDQ_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  if (requested > 0) n = std::min(n, requested);
  return n;
}

}  // namespace predq::cli

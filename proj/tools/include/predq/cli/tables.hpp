#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace predq::cli {

/// One cell of a reproduced table with its reference value and verdict.
struct TableCell {
  std::string table;
  double lambda = 0.0;
  std::string column;
  double value = 0.0;
  double ci_half_width = 0.0;
  std::optional<double> reference;
  double rel_error = 0.0;
  double tolerance = 0.0;  // relative, already widened by the CI rule
  bool within = false;
  bool analytic = false;
  std::optional<double> threshold;  // optimal T for threshold columns
  std::uint64_t jobs = 0;
  std::string note;
};

struct TableOptions {
  std::uint64_t seed = 1;
  // Measured jobs per simulated cell; warm-up is a tenth of this. Table 1
  // uses ten times as many at lambda >= 0.98.
  std::uint64_t measured_jobs = 1'000'000;
  std::uint64_t probe_jobs = 100'000;
  unsigned threads = 1;
  std::vector<double> lambdas;       // empty: all rows
  std::vector<std::string> columns;  // empty: all columns
};

std::vector<double> table1_lambdas();
std::vector<std::string> table1_columns();  // FIFO, SJF, SPJF, PSJF, PSPJF, SRPT, SPRPT
std::vector<double> table23_lambdas();
std::vector<std::string> table23_columns();  // FIFO, THRESHOLD-NO-PREEMPT, ... , SPRPT

/// Printed reference value, if the cell exists.
std::optional<double> table1_reference(double lambda, const std::string& column);
std::optional<double> table23_reference(int table, double lambda, const std::string& column);

/// Decimal places of a printed Table 2/3 FIFO cell.
int table23_fifo_decimals(int table, double lambda);

/// Relative tolerance for a simulated cell: max(floor, 3 CI / reference).
double cell_tolerance(double floor, double ci_half_width, double reference);

/// Seed shared by every column of one row so columns compare under common
/// random numbers.
std::uint64_t row_seed(std::uint64_t seed, int table, double lambda);

TableCell run_table1_cell(double lambda, const std::string& column, const TableOptions& options);
/// The analytic M/M/1 FIFO cell.
TableCell table1_fifo_analytic(double lambda);
std::vector<TableCell> run_table1(const TableOptions& options);

/// table is 2 (exponential service) or 3 (Weibull service).
TableCell run_table23_cell(int table, double lambda, const std::string& column, const TableOptions& options);
std::vector<TableCell> run_table23(int table, const TableOptions& options);

/// Analytic one-bit optimum checked against a simulated PREDICTION cell of Table 2.
TableCell onebit_analytic_cell(double lambda, bool preemptive, const TableCell& simulated);

/// Thread count from PREDQ_THREADS, else hardware concurrency, capped by `requested` when nonzero.
unsigned thread_budget(unsigned requested = 0);

}  // namespace predq::cli

// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "predq/analytic/formulas.hpp"
#include "predq/cli/tables.hpp"
#include "predq/error.hpp"
#include "predq/llmserve/simulator.hpp"
#include "predq/llmserve/workload.hpp"
#include "predq/metrics/summary.hpp"
#include "predq/multiserver/cluster.hpp"
#include "predq/policies/single_queue.hpp"
#include "predq/policies/stability.hpp"
#include "predq/workload/source.hpp"

using namespace predq;
using policies::CostModel;
using policies::RankPolicy;
using workload::PredictionModel;
using workload::ServiceDistribution;

namespace {

// Fixed before any run; never tuned.
constexpr std::uint64_t kSeed = 1;

struct Verdict {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    lines.push_back(fmt::format("    {} {}", ok ? "ok  " : "FAIL", what));
  }
};

engine::RunControl control(std::uint64_t measured, std::uint64_t max_in_system = 1'000'000) {
  engine::RunControl c;
  c.measured_jobs = measured;
  c.warmup_jobs = measured / 10;
  c.max_in_system = max_in_system;
  return c;
}

engine::Records run(double lambda, const ServiceDistribution& service, const PredictionModel& prediction,
                    const RankPolicy& policy, std::uint64_t jobs, std::uint64_t seed,
                    std::uint64_t max_in_system = 1'000'000) {
  workload::PoissonJobGenerator source(lambda, service, prediction, seed);
  return policies::simulate_single_queue(source, policy, control(jobs, max_in_system)).records;
}

std::string describe(const cli::TableCell& c) {
  std::string s = fmt::format("{} lambda={} {}: {:.4f}", c.table, c.lambda, c.column, c.value);
  if (c.reference) s += fmt::format(" vs {:.4f} (err {:+.2f}%, tol {:.2f}%)", *c.reference, 100 * c.rel_error, 100 * c.tolerance);
  if (c.threshold) s += fmt::format(" T={:.3f}", *c.threshold);
  if (!c.note.empty()) s += " [" + c.note + "]";
  return s;
}

cli::TableOptions table_options() {
  cli::TableOptions o;
  o.seed = kSeed;
  o.threads = cli::thread_budget();
  return o;
}

Verdict table1() {
  Verdict v;
  for (const auto& cell : cli::run_table1(table_options())) {
    if (cell.analytic) continue;  // the analytic FIFO column is criterion 2
    v.check(cell.within, describe(cell));
  }
  return v;
}

Verdict fifo_analytic() {
  Verdict v;
  for (double l : cli::table1_lambdas()) {
    const auto cell = cli::table1_fifo_analytic(l);
    v.check(cell.within, describe(cell));
  }
  const cli::TableOptions opts = table_options();
  for (double l : {0.5, 0.6, 0.7, 0.8, 0.95, 0.98}) {
    const auto cell = cli::run_table23_cell(3, l, "FIFO", opts);
    v.check(cell.within, describe(cell));
  }
  const auto excluded = cli::run_table23_cell(3, 0.9, "FIFO", opts);
  v.lines.push_back("    info " + describe(excluded));
  return v;
}

Verdict bessel_identity() {
  Verdict v;
  for (double l : {0.5, 0.8, 0.95}) {
    for (double t : {0.25, 1.0, 4.0}) {
      const double t1 = analytic::onebit_t1(l, t).mean_response;
      const double t2 = analytic::onebit_t2(l, t).mean_response;
      v.check(std::abs(t1 - (l * t2 + 1.0)) <= 1e-9 && t2 <= t1,
              fmt::format("lambda={} T={}: t1={:.12f} lambda*t2+1={:.12f}", l, t, t1, l * t2 + 1.0));
    }
    const double fifo = 1.0 / (1.0 - l);
    const double t1 = analytic::onebit_t1(l, 1e4).mean_response;
    const double t2 = analytic::onebit_t2(l, 1e4).mean_response;
    v.check(std::abs(t1 - fifo) <= 1e-6 && std::abs(t2 - fifo) <= 1e-6,
            fmt::format("lambda={} T=1e4: t1={:.9f} t2={:.9f} 1/(1-lambda)={:.9f}", l, t1, t2, fifo));
  }
  return v;
}

Verdict tables23() {
  Verdict v;
  const auto opts = table_options();
  for (int table : {2, 3}) {
    auto cols = cli::table23_columns();
    cols.erase(std::remove(cols.begin(), cols.end(), "FIFO"), cols.end());
    auto o = opts;
    o.columns = cols;
    const auto cells = cli::run_table23(table, o);
    for (const auto& cell : cells) v.check(cell.within, describe(cell));
    if (table == 2) {
      for (const auto& cell : cells) {
        if (cell.column == "PREDICTION-PREEMPT" || cell.column == "PREDICTION-NO-PREEMPT") {
          const auto a = cli::onebit_analytic_cell(cell.lambda, cell.column == "PREDICTION-PREEMPT", cell);
          v.check(a.within, describe(a));
        }
      }
    }
  }
  return v;
}

Verdict oracle_reductions() {
  Verdict v;
  const auto exp = ServiceDistribution::exponential();
  const auto exact = PredictionModel::exact();
  const std::uint64_t jobs = 200'000;
  for (double l : {0.5, 0.8, 0.95}) {
    const std::vector<std::pair<RankPolicy, RankPolicy>> pairs{
        {RankPolicy::sprpt(), RankPolicy::srpt()},
        {RankPolicy::spjf(), RankPolicy::sjf()},
        {RankPolicy::pspjf(), RankPolicy::psjf()},
    };
    for (const auto& [pred, oracle] : pairs) {
      const bool same = run(l, exp, exact, pred, jobs, kSeed + 5) == run(l, exp, exact, oracle, jobs, kSeed + 5);
      v.check(same, fmt::format("lambda={} {} == {} on {} records", l, pred.name(), oracle.name(), jobs));
    }
    // a threshold above every size classifies all jobs short
    const auto all_short = PredictionModel::one_bit(1e300, PredictionModel::exponential_mean());
    for (bool preemptive : {false, true}) {
      const bool same = run(l, exp, all_short, RankPolicy::two_class(preemptive, false, 1e300), jobs, kSeed + 5) ==
                        run(l, exp, all_short, RankPolicy::fifo(), jobs, kSeed + 5);
      v.check(same, fmt::format("lambda={} all-short two-class (preemptive={}) == FIFO", l, preemptive));
    }
  }
  return v;
}

Verdict graceful_degradation() {
  Verdict v;
  const std::uint64_t jobs = 1'000'000;
  for (double l : {0.5, 0.8}) {
    for (const auto& [beta, alpha] : std::vector<std::pair<double, double>>{{0.9, 1.1}, {0.5, 2.0}}) {
      const auto pred = PredictionModel::bounded_multiplicative(beta, alpha);
      const auto exp = ServiceDistribution::exponential();
      const auto a = run(l, exp, pred, RankPolicy::pspjf(), jobs, kSeed + 6);
      const auto b = run(l, exp, pred, RankPolicy::srpt(), jobs, kSeed + 6);
      const double bound = 1.5 * alpha / beta;
      std::vector<double> slack(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) slack[i] = bound * b[i].response() - a[i].response();
      const auto m = metrics::summarize(slack);
      const auto ma = metrics::summarize(a), mb = metrics::summarize(b);
      v.check(m.mean > 3.0 * m.ci_half_width,
              fmt::format("lambda={} beta={} alpha={}: PSPJF {:.4f} <= {:.3f} x SRPT {:.4f} (slack {:.4f} +- {:.4f})", l,
                          beta, alpha, ma.mean, bound, mb.mean, m.mean, m.ci_half_width));
    }
  }
  return v;
}

Verdict bounce() {
  Verdict v;
  const auto pred = PredictionModel::bounded_multiplicative(0.99, 1.01);
  const auto exp = ServiceDistribution::exponential();
  const auto a = metrics::summarize(run(0.8, exp, pred, RankPolicy::sprpt_bounce(), 1'000'000, kSeed + 7));
  const auto b = metrics::summarize(run(0.8, exp, pred, RankPolicy::srpt(), 1'000'000, kSeed + 7));
  const double rel = (a.mean - b.mean) / b.mean;
  v.check(std::abs(rel) <= 0.02, fmt::format("bounce {:.4f} vs SRPT {:.4f} ({:+.2f}%, tol 2%)", a.mean, b.mean, 100 * rel));
  return v;
}

Verdict cost_aware() {
  Verdict v;
  const auto exp = ServiceDistribution::exponential();
  const auto one_bit = PredictionModel::one_bit(1.0, PredictionModel::exponential_mean());
  const std::uint64_t jobs = 200'000;
  const auto composite = run(0.8, exp, one_bit, RankPolicy::two_class(true, false, 1.0, true), jobs, kSeed + 8);
  v.check(run(0.8, exp, one_bit, RankPolicy::skip_predict(CostModel::external(0, 0), 1.0), jobs, kSeed + 8) == composite,
          "zero-cost external SkipPredict == two-class with SPRPT long class");
  {
    // server-time predictions of zero length still count as first service
    const auto timed = run(0.8, exp, one_bit, RankPolicy::skip_predict(CostModel::server_time(0, 0), 1.0), jobs, kSeed + 8);
    bool same = timed.size() == composite.size();
    for (std::size_t i = 0; same && i < timed.size(); ++i) {
      same = timed[i].id == composite[i].id && timed[i].arrival == composite[i].arrival &&
             timed[i].completion == composite[i].completion;
    }
    v.check(same, "zero-cost server-time SkipPredict completions == two-class with SPRPT long class");
  }

  const auto bounded = ServiceDistribution::empirical({0.5, 1.0, 1.5});
  const auto pred = PredictionModel::exponential_mean();
  v.check(run(0.8, bounded, pred, RankPolicy::delay_predict(CostModel::external(0, 0), 1e6), jobs, kSeed + 8) ==
              run(0.8, bounded, pred, RankPolicy::fifo(), jobs, kSeed + 8),
          "DelayPredict with limit 1e6 == FIFO on sizes bounded by 1.5");

  // The up-front load check, then a run whose backlog limit a stable queue at
  // these loads never approaches and an unstable one crosses early.
  auto detects_instability = [](double lambda, const ServiceDistribution& service, const PredictionModel& prediction,
                                const RankPolicy& policy) {
    try {
      policies::require_stable(lambda, service, prediction, policy);
      run(lambda, service, prediction, policy, 2'000'000, kSeed + 9, 10'000);
    } catch (const InstabilityError&) {
      return true;
    }
    return false;
  };
  // long fraction with exponential sizes and predictions at T=1 is 2 K1(2)
  const double p_long = 2.0 * analytic::bessel_k(1, 2.0);
  struct Case {
    double lambda;
    double cheap, full;
  };
  for (const auto& c : {Case{0.95, 0.1, 0.2}, Case{0.85, 0.1, 0.2}, Case{0.8, 0.25, 0.0}, Case{0.78, 0.25, 0.0}, Case{0.75, 0.2, 0.3}}) {
    const double load = c.lambda * (1.0 + c.cheap + c.full * p_long);
    const auto policy = RankPolicy::skip_predict(CostModel::server_time(c.cheap, c.full), 1.0);
    const bool unstable = detects_instability(c.lambda, exp, one_bit, policy);
    v.check(unstable == (load >= 1.0), fmt::format("SkipPredict server-time lambda={} cheap={} full={}: load {:.4f}, {}",
                                                   c.lambda, c.cheap, c.full, load,
                                                   unstable ? "instability detected" : "stable run"));
  }
  for (const auto& c : {Case{0.95, 0.0, 0.3}, Case{0.9, 0.0, 0.05}}) {
    // every job that outlives the limit pays the full prediction
    const double load = c.lambda * (1.0 + c.full * std::exp(-1.0));
    const auto policy = RankPolicy::delay_predict(CostModel::server_time(0.0, c.full), 1.0);
    const bool unstable = detects_instability(c.lambda, exp, PredictionModel::exponential_mean(), policy);
    v.check(unstable == (load >= 1.0), fmt::format("DelayPredict server-time lambda={} full={}: load {:.4f}, {}",
                                                   c.lambda, c.full, load,
                                                   unstable ? "instability detected" : "stable run"));
  }
  return v;
}

std::vector<llm::LlmRequest> isolated(std::uint64_t n_input, std::uint64_t n_output, std::vector<llm::ApiCall> calls = {}) {
  llm::LlmRequest r;
  r.n_input = n_input;
  r.n_output = n_output;
  r.predicted_output = double(n_output);
  r.api_calls = std::move(calls);
  return {r};
}

engine::RunControl llm_control(std::uint64_t n, std::uint64_t warmup = 0) {
  engine::RunControl c;
  c.measured_jobs = n;
  c.warmup_jobs = warmup;
  c.max_in_system = n + warmup + 1;
  return c;
}

Verdict llm_identities() {
  Verdict v;
  using namespace llm;
  const GpuConfig gpu;
  for (const auto& [n_in, n_out] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{512, 10}, {100, 1}, {300, 400}}) {
    const auto res = simulate_llm(isolated(n_in, n_out), Pooled{1, gpu}, LlmPolicy::fifo(), {}, llm_control(1), {true});
    const auto l = request_latency(res.records.at(0));
    const double expected = gpu.ttft(n_in) + double(n_out) * gpu.tpot;
    v.check(l.t_waiting == 0.0 && std::abs(l.t_response - expected) <= 1e-12 * expected,
            fmt::format("isolated n_input={} n_output={}: response {:.6f} = TTFT + n_output*TPOT = {:.6f}", n_in, n_out,
                        l.t_response, expected));
  }
  for (const auto& [n_in, trigger, duration] : std::vector<std::tuple<std::uint64_t, std::uint64_t, double>>{
           {290, 10, 2.0}, {1000, 37, 0.75}}) {
    const auto res = simulate_llm(isolated(n_in, 50, {{trigger, duration, MemoryStrategy::kPreserve}}), Pooled{1, gpu},
                                  LlmPolicy::fifo(), {}, llm_control(1), {true});
    const double expected = double(n_in + trigger) * duration;
    v.check(std::abs(res.waste.api_preserve - expected) <= 1e-9 * expected,
            fmt::format("preserve waste {:.6f} = kv_tokens x duration = {:.6f}", res.waste.api_preserve, expected));
  }

  // randomized soak with the memory audit on
  LlmWorkloadConfig wl;
  wl.input = TokenDistribution::uniform(16, 1200);
  wl.output = TokenDistribution::bimodal(10, 500, 0.5);
  wl.prediction = PredictionModel::uniform_multiplicative(0.5);
  wl.api_probability = 0.2;
  wl.api_calls_per_request = 2;
  GpuConfig small = gpu;
  small.kv_capacity = 4096;
  // Discard thrashes on this workload above ~0.5, so keep it stable; memory still saturates
  wl.arrival_rate = arrival_rate_for_load(0.4, wl.input, wl.output, small);
  const std::uint64_t n = 100'000;
  struct Soak {
    LlmPolicy policy;
    Strategies strategies;
  };
  for (const auto& s : {Soak{LlmPolicy::sprpt(), {MemoryStrategy::kDiscardRecompute, MemoryStrategy::kDiscardRecompute}},
                        Soak{LlmPolicy::trail(0.5), {MemoryStrategy::kSwap, MemoryStrategy::kSwap}},
                        Soak{LlmPolicy::fifo(), {MemoryStrategy::kDiscardRecompute, MemoryStrategy::kPreserve}}}) {
    const std::string label = fmt::format("{} preempt={} api={}", s.policy.name(), to_string(s.strategies.preemption),
                                          to_string(s.strategies.api));
    try {
      const auto res = simulate_llm(generate_llm_workload(wl, n, kSeed + 10), Pooled{1, small}, s.policy, s.strategies,
                                    llm_control(n), {true, true});
      std::size_t bad = 0;
      for (const auto& ev : res.recompute_events) bad += ev.tokens != ev.n_input + ev.generated;
      v.check(res.records.size() == n && res.peak_kv_tokens <= small.kv_capacity,
              fmt::format("soak {}: {} requests, {} preemptions, peak kv {} <= {}", label, res.records.size(),
                          res.counters.preemptions, res.peak_kv_tokens, small.kv_capacity));
      v.check(bad == 0, fmt::format("soak {}: {} recompute events equal n_input + generated ({} mismatches)", label,
                                    res.recompute_events.size(), bad));
    } catch (const std::exception& e) {
      v.check(false, fmt::format("soak {}: {}", label, e.what()));
    }
  }
  return v;
}

Verdict llm_policy_gap() {
  Verdict v;
  using namespace llm;
  const GpuConfig gpu;
  LlmWorkloadConfig wl;
  wl.input = TokenDistribution::constant(128);
  wl.output = TokenDistribution::bimodal(10, 500, 0.5);
  wl.arrival_rate = arrival_rate_for_load(0.8, wl.input, wl.output, gpu);
  const std::uint64_t n = 50'000, warmup = 5'000;
  const auto requests = generate_llm_workload(wl, n + warmup, kSeed + 11);
  auto latencies = [&](const LlmPolicy& p) {
    const auto res = simulate_llm(requests, Pooled{1, gpu}, p, {}, llm_control(n, warmup), {false, false});
    std::vector<double> out;
    for (const auto& r : res.records) out.push_back(request_latency(r).t_response);
    return out;
  };
  const auto fifo = latencies(LlmPolicy::fifo());
  const auto sprpt = latencies(LlmPolicy::sprpt());
  auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return metrics::summarize(d);
  };
  const auto mf = metrics::summarize(fifo), ms = metrics::summarize(sprpt);
  const auto gap = diff(fifo, sprpt);
  v.check(gap.mean > 3.0 * gap.ci_half_width,
          fmt::format("FIFO {:.3f} - SPRPT {:.3f} = {:.3f} +- {:.3f}", mf.mean, ms.mean, gap.mean, gap.ci_half_width));
  for (double c : {0.25, 0.5, 0.75}) {
    const auto trail = latencies(LlmPolicy::trail(c));
    const auto mt = metrics::summarize(trail);
    const auto above = diff(trail, sprpt), below = diff(fifo, trail);
    v.check(above.mean > -3.0 * above.ci_half_width && below.mean > 3.0 * below.ci_half_width,
            fmt::format("Trail(c={}) {:.3f}: {:+.3f} +- {:.3f} over SPRPT, {:.3f} +- {:.3f} under FIFO", c, mt.mean,
                        above.mean, above.ci_half_width, below.mean, below.ci_half_width));
  }
  return v;
}

Verdict power_of_d() {
  Verdict v;
  multiserver::ClusterConfig cfg;
  cfg.n = 100;
  cfg.lambda_per_server = 0.9;
  const engine::RunControl ctl = control(2'000'000);
  cfg.d = 1;
  const auto one = multiserver::simulate_cluster(cfg, ctl, kSeed + 12);
  cfg.d = 2;
  const auto two = multiserver::simulate_cluster(cfg, ctl, kSeed + 12);
  const auto cmp = metrics::paired_compare(one.records, two.records);
  v.check(cmp.mean_difference > 3.0 * cmp.ci_half_width,
          fmt::format("d=1 {:.4f}, d=2 {:.4f}: gap {:.4f} +- {:.4f}", one.metrics.mean, two.metrics.mean,
                      cmp.mean_difference, cmp.ci_half_width));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"table 1 reproduction", table1},
      {"FIFO closed forms", fifo_analytic},
      {"one-bit identity and limits", bessel_identity},
      {"tables 2-3 reproduction", tables23},
      {"oracle reductions", oracle_reductions},
      {"graceful degradation", graceful_degradation},
      {"bounce converges to SRPT", bounce},
      {"cost-aware reductions and stability", cost_aware},
      {"LLM simulator identities", llm_identities},
      {"LLM policy gap", llm_policy_gap},
      {"power-of-d gap", power_of_d},
  };
  // optional list of criterion numbers to run
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));

  int failed = 0;
  std::vector<std::string> summary;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int number = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& line : v.lines) fmt::print("{}\n", line);
    const auto verdict = fmt::format("{} criterion {:2}: {} ({:.0f} s)", v.pass ? "PASS" : "FAIL", number,
                                     criteria[k].first, seconds);
    fmt::print("{}\n", verdict);
    std::fflush(stdout);
    summary.push_back(verdict);
    failed += v.pass ? 0 : 1;
  }
  fmt::print("\n");
  for (const auto& s : summary) fmt::print("{}\n", s);
  return failed == 0 ? 0 : 1;
}

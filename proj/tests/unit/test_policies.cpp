#include <doctest.h>

#include <cmath>
#include <vector>

#include "predq/metrics/summary.hpp"
#include "predq/policies/policy.hpp"
#include "predq/policies/rank.hpp"
#include "predq/analytic/formulas.hpp"
#include "predq/policies/single_queue.hpp"
#include "predq/policies/stability.hpp"
#include "predq/policies/threshold_search.hpp"
#include "predq/workload/source.hpp"
#include "support.hpp"

using namespace predq;
using policies::CostModel;
using policies::JobView;
using policies::OracleView;
using policies::Rank;
using policies::RankPolicy;
using testing::job;
using workload::PredictionModel;
using workload::ServiceDistribution;
using workload::SizeClass;

namespace {

engine::Records run_trace(std::vector<workload::JobSpec> jobs, const RankPolicy& policy) {
  const auto n = jobs.size();
  workload::TraceJobSource source(std::move(jobs));
  return policies::simulate_single_queue(source, policy, testing::control(n), true).records;
}

engine::Records run_poisson(const RankPolicy& policy, const PredictionModel& prediction, double lambda,
                            std::uint64_t seed, std::uint64_t jobs,
                            const ServiceDistribution& service = ServiceDistribution::exponential(),
                            bool audit = false) {
  workload::PoissonJobGenerator source(lambda, service, prediction, seed);
  return policies::simulate_single_queue(source, policy, testing::control(jobs, jobs / 10), audit).records;
}

JobView view(double z, double age, std::uint64_t seq = 0) {
  JobView v;
  v.predicted_size = z;
  v.age = age;
  v.arrival_seq = seq;
  return v;
}

}  // namespace

TEST_CASE("rank order compares level, value, then arrival") {
  CHECK(Rank{0, 5.0, 9} < Rank{1, 0.0, 0});
  CHECK(Rank{0, 1.0, 9} < Rank{0, 2.0, 0});
  CHECK(Rank{0, 1.0, 1} < Rank{0, 1.0, 2});
  CHECK_FALSE(Rank{0, 1.0, 2} < Rank{0, 1.0, 2});
}

TEST_CASE("SRPT rank") {
  CHECK(policies::rank_srpt(OracleView{5.0, 0.0, 0}).value == 5.0);
  CHECK(policies::rank_srpt(OracleView{5.0, 5.0, 0}).value == 0.0);
  // remaining 2 beats remaining 3
  CHECK(policies::rank_srpt(OracleView{5.0, 3.0, 1}) < policies::rank_srpt(OracleView{3.0, 0.0, 0}));
}

TEST_CASE("SPRPT rank goes negative past the estimate") {
  CHECK(policies::rank_sprpt(view(5.0, 7.0)).value == -2.0);
  CHECK(policies::rank_sprpt(view(5.0, 2.0, 1)) < policies::rank_sprpt(view(4.0, 0.0, 0)));
  CHECK_THROWS_AS(policies::rank_sprpt(JobView{}), LogicError);
}

TEST_CASE("bounce rank falls to zero then climbs back and flattens") {
  const double expected[][2] = {{0, 4}, {4, 0}, {6, 2}, {8, 4}, {10, 4}, {12, 4}};
  for (const auto& e : expected) CHECK(policies::rank_sprpt_bounce(view(4.0, e[0])).value == e[1]);
  CHECK_THROWS_AS(policies::rank_sprpt_bounce(JobView{}), LogicError);
}

TEST_CASE("job-first ranks ignore age") {
  CHECK(policies::rank_spjf(view(3.0, 2.0)).value == 3.0);
  CHECK(policies::rank_pspjf(view(3.0, 2.0)).value == 3.0);
  CHECK(policies::rank_sjf(OracleView{4.0, 1.0, 0}).value == 4.0);
  CHECK(policies::rank_psjf(OracleView{4.0, 1.0, 0}).value == 4.0);
  CHECK_THROWS_AS(policies::rank_spjf(JobView{}), LogicError);
}

TEST_CASE("two-class rank") {
  JobView v;
  v.class_bit = SizeClass::kLong;
  CHECK(policies::rank_two_class(v, std::nullopt, 1.0, false).level == 1);
  CHECK(policies::rank_two_class(v, OracleView{0.5, 0.0, 0}, 1.0, true).level == 0);
  CHECK(policies::rank_two_class(v, OracleView{1.5, 0.0, 0}, 1.0, true).level == 1);
  CHECK_THROWS_AS(policies::rank_two_class(JobView{}, std::nullopt, 1.0, false), LogicError);
  CHECK_THROWS_AS(policies::rank_two_class(JobView{}, std::nullopt, 1.0, true), LogicError);
}

TEST_CASE("policy parameters are validated") {
  CHECK_THROWS_AS(RankPolicy::trail(1.5), ConfigError);
  CHECK_THROWS_AS(RankPolicy::trail(-0.1), ConfigError);
  CHECK_THROWS_AS(RankPolicy::delay_predict(CostModel::external(0, 0), 0.0), ConfigError);
  CHECK_THROWS_AS(RankPolicy::two_class(true, true, 0.0), ConfigError);
  CHECK_THROWS_AS(CostModel::external(-1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(CostModel::server_time(0.0, -1.0), ConfigError);
  CHECK_FALSE(RankPolicy::spjf().preemptive());
  CHECK(RankPolicy::pspjf().preemptive());
  CHECK(RankPolicy::srpt().is_oracle());
  CHECK_FALSE(RankPolicy::sprpt().is_oracle());
}

TEST_CASE("PSPJF preempts a longer predicted job, SPJF does not") {
  const std::vector<workload::JobSpec> jobs{job(0, 0.0, 5.0, 5.0), job(1, 1.0, 3.0, 3.0)};
  const auto pre = run_trace(jobs, RankPolicy::pspjf());
  CHECK(pre[1].completion == 4.0);
  CHECK(pre[0].completion == 8.0);
  const auto non = run_trace(jobs, RankPolicy::spjf());
  CHECK(non[0].completion == 5.0);
  CHECK(non[1].completion == 8.0);
}

TEST_CASE("SJF with equal sizes is FIFO") {
  const auto r = run_trace({job(0, 0.0, 1.0), job(1, 0.1, 1.0), job(2, 0.2, 1.0)}, RankPolicy::sjf());
  CHECK(r[0].completion == 1.0);
  CHECK(r[1].completion == 2.0);
  CHECK(r[2].completion == 3.0);
}

TEST_CASE("SPRPT holds the server once a job outlives its estimate") {
  // job 0 predicted 2 but needs 5; at t=3 its rank is -1 so job 1 (z=0.5) waits
  const auto r = run_trace({job(0, 0.0, 5.0, 2.0), job(1, 3.0, 0.5, 0.5)}, RankPolicy::sprpt());
  CHECK(r[0].completion == 5.0);
  CHECK(r[1].completion == 5.5);
}

TEST_CASE("bounce lets a waiting job in once the running rank climbs past it") {
  // job 0: z=4, size 10. job 1 arrives at 1 with z=3. Job 0's rank climbs
  // back to 3 at age 7, so job 1 runs [7,8] and job 0 finishes at 11.
  const std::vector<workload::JobSpec> jobs{job(0, 0.0, 10.0, 4.0), job(1, 1.0, 1.0, 3.0)};
  const auto bounce = run_trace(jobs, RankPolicy::sprpt_bounce());
  CHECK(bounce[1].completion == doctest::Approx(8.0));
  CHECK(bounce[0].completion == doctest::Approx(11.0));
  const auto plain = run_trace(jobs, RankPolicy::sprpt());
  CHECK(plain[0].completion == 10.0);
  CHECK(plain[1].completion == 11.0);
}

TEST_CASE("Trail gate") {
  SUBCASE("no preemption once age reaches c times the estimate") {
    const auto r = run_trace({job(0, 0.0, 4.0, 4.0), job(1, 2.5, 1.0, 1.0)}, RankPolicy::trail(0.5));
    CHECK(r[0].completion == 4.0);
    CHECK(r[1].completion == 5.0);
  }
  SUBCASE("preemption before the gate closes") {
    const auto r = run_trace({job(0, 0.0, 4.0, 4.0), job(1, 1.5, 1.0, 1.0)}, RankPolicy::trail(0.5));
    CHECK(r[1].completion == 2.5);
    CHECK(r[0].completion == 5.0);
  }
  SUBCASE("c=1 with exact predictions is SRPT") {
    CHECK(run_poisson(RankPolicy::trail(1.0), PredictionModel::exact(), 0.9, 31, 50000) ==
          run_poisson(RankPolicy::srpt(), PredictionModel::exact(), 0.9, 31, 50000));
  }
  SUBCASE("c=0 never preempts: shortest predicted job first") {
    CHECK(run_poisson(RankPolicy::trail(0.0), PredictionModel::exponential_mean(), 0.9, 32, 50000) ==
          run_poisson(RankPolicy::spjf(), PredictionModel::exponential_mean(), 0.9, 32, 50000));
  }
}

TEST_CASE("exact predictions reduce to the oracle policies") {
  const auto exact = PredictionModel::exact();
  for (double lambda : {0.5, 0.9}) {
    CHECK(run_poisson(RankPolicy::sprpt(), exact, lambda, 3, 100000) == run_poisson(RankPolicy::srpt(), exact, lambda, 3, 100000));
    CHECK(run_poisson(RankPolicy::spjf(), exact, lambda, 4, 100000) == run_poisson(RankPolicy::sjf(), exact, lambda, 4, 100000));
    CHECK(run_poisson(RankPolicy::pspjf(), exact, lambda, 5, 100000) == run_poisson(RankPolicy::psjf(), exact, lambda, 5, 100000));
    CHECK(run_poisson(RankPolicy::sprpt_bounce(), exact, lambda, 6, 100000) ==
          run_poisson(RankPolicy::srpt(), exact, lambda, 6, 100000));
  }
}

TEST_CASE("two-class policies with every job short are FIFO") {
  const auto all_short = PredictionModel::one_bit(1e300, PredictionModel::exponential_mean());
  const auto fifo = run_poisson(RankPolicy::fifo(), all_short, 0.8, 7, 100000);
  for (bool preemptive : {false, true}) {
    CHECK(run_poisson(RankPolicy::two_class(preemptive, false, 1.0), all_short, 0.8, 7, 100000) == fifo);
    CHECK(run_poisson(RankPolicy::two_class(preemptive, true, 1e300), all_short, 0.8, 7, 100000) == fifo);
  }
}

TEST_CASE("two-class preemption only lets short jobs displace long ones") {
  const std::vector<workload::JobSpec> jobs{job(0, 0.0, 3.0), job(1, 1.0, 0.5), job(2, 1.2, 0.4)};
  // threshold 1: job 0 long, jobs 1 and 2 short
  const auto pre = run_trace(jobs, RankPolicy::two_class(true, true, 1.0));
  CHECK(pre[1].completion == 1.5);
  CHECK(pre[2].completion == doctest::Approx(1.9));
  CHECK(pre[0].completion == doctest::Approx(3.9));
  const auto non = run_trace(jobs, RankPolicy::two_class(false, true, 1.0));
  CHECK(non[0].completion == 3.0);
  CHECK(non[1].completion == 3.5);
  CHECK(non[2].completion == doctest::Approx(3.9));
}

TEST_CASE("last-come-first-served short class") {
  const std::vector<workload::JobSpec> jobs{job(0, 0.0, 0.5), job(1, 0.1, 0.5)};
  const auto lifo = run_trace(jobs, RankPolicy::two_class(true, true, 1.0, false, true));
  CHECK(lifo[1].completion == doctest::Approx(0.6));
  CHECK(lifo[0].completion == doctest::Approx(1.0));
  const auto fifo = run_trace(jobs, RankPolicy::two_class(true, true, 1.0));
  CHECK(fifo[0].completion == 0.5);
  CHECK(fifo[1].completion == 1.0);
  CHECK(RankPolicy::two_class(true, true, 1.0, false, true).lifo_short());
}

TEST_CASE("DelayPredict two-job schedule") {
  // size 3 arrives at 0, size 1 at 0.5, limit 2, exact predictions
  const std::vector<workload::JobSpec> jobs{job(0, 0.0, 3.0, 3.0), job(1, 0.5, 1.0, 1.0)};
  SUBCASE("external cost") {
    const auto r = run_trace(jobs, RankPolicy::delay_predict(CostModel::external(0.0, 0.5), 2.0));
    CHECK(r[1].first_service == 2.0);
    CHECK(r[1].completion == 3.0);
    CHECK(r[0].completion == 4.0);
    CHECK(r[0].cost == 0.5);
    CHECK(r[1].cost == 0.0);
  }
  SUBCASE("server-time cost") {
    const auto r = run_trace(jobs, RankPolicy::delay_predict(CostModel::server_time(0.0, 0.5), 2.0));
    CHECK(r[1].completion == 3.0);
    CHECK(r[0].completion == 4.5);
  }
}

TEST_CASE("DelayPredict limits") {
  SUBCASE("huge limit is FIFO") {
    const auto dist = ServiceDistribution::deterministic(1.0);
    const auto pred = PredictionModel::exponential_mean();
    CHECK(run_poisson(RankPolicy::delay_predict(CostModel::external(0, 0), 1e6), pred, 0.8, 8, 50000, dist) ==
          run_poisson(RankPolicy::fifo(), pred, 0.8, 8, 50000, dist));
  }
  SUBCASE("tiny limit with free predictions approaches SPRPT") {
    const auto pred = PredictionModel::exponential_mean();
    const double delay =
        testing::mean_response(run_poisson(RankPolicy::delay_predict(CostModel::external(0, 0), 1e-9), pred, 0.8, 9, 50000));
    const double sprpt = testing::mean_response(run_poisson(RankPolicy::sprpt(), pred, 0.8, 9, 50000));
    CHECK(delay == doctest::Approx(sprpt).epsilon(1e-4));
  }
}

TEST_CASE("SkipPredict reductions and accounting") {
  const auto one_bit = PredictionModel::one_bit(1.0, PredictionModel::exponential_mean());
  const auto composite = run_poisson(RankPolicy::two_class(true, false, 1.0, true), one_bit, 0.8, 10, 100000);
  SUBCASE("free predictions give the two-class SPRPT composite") {
    CHECK(run_poisson(RankPolicy::skip_predict(CostModel::external(0, 0), 1.0), one_bit, 0.8, 10, 100000) == composite);
    // Server-time predictions occupy the server (for zero time here), so only
    // first_service may move: a job is first served when its prediction runs.
    const auto timed = run_poisson(RankPolicy::skip_predict(CostModel::server_time(0, 0), 1.0), one_bit, 0.8, 10, 100000);
    REQUIRE(timed.size() == composite.size());
    bool same_completions = true;
    for (std::size_t i = 0; i < timed.size(); ++i) {
      same_completions = same_completions && timed[i].id == composite[i].id &&
                         timed[i].completion == composite[i].completion && timed[i].first_service <= composite[i].first_service;
    }
    CHECK(same_completions);
  }
  SUBCASE("external cost charged per job and per long job") {
    const double cheap = 0.1, full = 1.0;
    const std::uint64_t n = 50000, warm = n / 10;
    const auto r = run_poisson(RankPolicy::skip_predict(CostModel::external(cheap, full), 1.0), one_bit, 0.8, 11, n);
    workload::PoissonJobGenerator replay(0.8, ServiceDistribution::exponential(), one_bit, 11);
    std::uint64_t longs = 0;
    for (std::uint64_t i = 0; i < warm + n; ++i) {
      const auto j = *replay.next();
      if (i >= warm && *j.class_bit == SizeClass::kLong) ++longs;
    }
    double charged = 0.0;
    for (const auto& rec : r) charged += rec.cost;
    CHECK(charged == doctest::Approx(cheap * double(n) + full * double(longs)).epsilon(1e-12));
    const auto m = metrics::summarize(r);
    CHECK(m.cost_adjusted_mean() == doctest::Approx(m.mean + charged / double(n)));
  }
  SUBCASE("server-time predictions past capacity are unstable") {
    // 0.95 * (1 + 0.1 + 0.2 * P(long)) > 1
    workload::PoissonJobGenerator source(0.95, ServiceDistribution::exponential(), one_bit, 12);
    CHECK_THROWS_AS(policies::simulate_single_queue(source, RankPolicy::skip_predict(CostModel::server_time(0.1, 0.2), 1.0),
                                                    testing::control(2'000'000, 0, 5000)),
                    InstabilityError);
  }
  SUBCASE("server-time predictions below capacity add their work to utilization") {
    workload::PoissonJobGenerator source(0.7, ServiceDistribution::exponential(), one_bit, 13);
    const auto res = policies::simulate_single_queue(
        source, RankPolicy::skip_predict(CostModel::server_time(0.1, 0.1), 1.0), testing::control(200000, 20000));
    // long fraction under exponential sizes and predictions with T=1 is 2 K1(2) ~ 0.2797
    const double demand = 1.0 + 0.1 + 0.1 * 0.27973;
    CHECK(res.stats.busy_time / res.stats.end_time == doctest::Approx(0.7 * demand).epsilon(0.02));
  }
}

TEST_CASE("preemptive policies always serve a minimal-rank job") {
  const auto pred = PredictionModel::exponential_mean();
  const auto one_bit = PredictionModel::one_bit(1.0, pred);
  const std::vector<std::pair<RankPolicy, PredictionModel>> cases{
      {RankPolicy::srpt(), pred},
      {RankPolicy::psjf(), pred},
      {RankPolicy::sprpt(), pred},
      {RankPolicy::pspjf(), pred},
      {RankPolicy::sprpt_bounce(), PredictionModel::bounded_multiplicative(0.5, 2.0)},
      {RankPolicy::trail(0.5), pred},
      {RankPolicy::two_class(true, false, 1.0), one_bit},
      {RankPolicy::two_class(true, true, 1.0, true, true), pred},
      {RankPolicy::skip_predict(CostModel::server_time(0.05, 0.1), 1.0), one_bit},
      {RankPolicy::delay_predict(CostModel::server_time(0.0, 0.1), 1.0), pred},
  };
  for (const auto& [policy, prediction] : cases) {
    CAPTURE(policy.name());
    CHECK_NOTHROW(run_poisson(policy, prediction, 0.8, 14, 30000, ServiceDistribution::exponential(), true));
  }
}

TEST_CASE("policy ordering with exponential predictions") {
  const auto pred = PredictionModel::exponential_mean();
  const std::uint64_t n = 200000;
  auto runp = [&](const RankPolicy& p) { return run_poisson(p, pred, 0.8, 15, n); };
  const auto fifo = runp(RankPolicy::fifo()), sjf = runp(RankPolicy::sjf()), spjf = runp(RankPolicy::spjf());
  const auto psjf = runp(RankPolicy::psjf()), pspjf = runp(RankPolicy::pspjf()), srpt = runp(RankPolicy::srpt());
  auto lower = [](const engine::Records& a, const engine::Records& b) {
    const auto cmp = metrics::paired_compare(a, b);
    return cmp.mean_difference < 0.0 && cmp.significant();
  };
  CHECK(lower(srpt, sjf));
  CHECK(lower(sjf, spjf));
  CHECK(lower(spjf, fifo));
  CHECK(lower(srpt, psjf));
  CHECK(lower(psjf, pspjf));
}

TEST_CASE("threshold search finds the interior optimum of a known curve") {
  // objective (ln T - ln 2)^2 + 1, ignoring the run control
  const policies::ThresholdObjective f = [](double t, const engine::RunControl&, std::uint64_t) {
    metrics::Metrics m;
    m.mean = std::pow(std::log(t) - std::log(2.0), 2) + 1.0;
    return m;
  };
  policies::ThresholdSearchOptions opts;
  const auto res = policies::optimize_threshold(f, opts, 1);
  CHECK(res.threshold == doctest::Approx(2.0).epsilon(0.02));
  CHECK(res.metrics.mean == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.probes > 2);
  opts.lo = 5.0;
  opts.hi = 1.0;
  CHECK_THROWS_AS(policies::optimize_threshold(f, opts, 1), ConfigError);
}

TEST_CASE("offered load counts server-time predictions") {
  const auto exp = ServiceDistribution::exponential();
  const auto one_bit = PredictionModel::one_bit(1.0, PredictionModel::exponential_mean());
  CHECK(policies::offered_load(0.8, exp, one_bit, RankPolicy::fifo()) == doctest::Approx(0.8));
  CHECK(policies::offered_load(0.8, exp, one_bit, RankPolicy::skip_predict(CostModel::external(5, 5), 1.0)) ==
        doctest::Approx(0.8));
  // long fraction is 2 K1(2) for exponential sizes and predictions at T=1
  const double p_long = 2.0 * analytic::bessel_k(1, 2.0);
  const double skip = policies::offered_load(0.7, exp, one_bit, RankPolicy::skip_predict(CostModel::server_time(0.1, 0.5), 1.0));
  CHECK(skip == doctest::Approx(0.7 * (1.1 + 0.5 * p_long)).epsilon(2e-3));
  const double delay = policies::offered_load(0.7, exp, PredictionModel::exact(),
                                              RankPolicy::delay_predict(CostModel::server_time(0, 0.5), 2.0));
  CHECK(delay == doctest::Approx(0.7 * (1.0 + 0.5 * std::exp(-2.0))).epsilon(2e-3));
  CHECK(policies::offered_load(0.5, ServiceDistribution::empirical({1.0, 3.0}), PredictionModel::exact(),
                               RankPolicy::fifo()) == doctest::Approx(1.0).epsilon(5e-3));
  CHECK_THROWS_AS(policies::require_stable(0.8, exp, one_bit, RankPolicy::skip_predict(CostModel::server_time(0.25, 0), 1.0)),
                  InstabilityError);
  CHECK_NOTHROW(policies::require_stable(0.79, exp, one_bit, RankPolicy::skip_predict(CostModel::server_time(0.25, 0), 1.0)));
}

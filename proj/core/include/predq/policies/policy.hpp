#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace predq::policies {

/// How predictions are paid for.
struct CostModel {
  enum class Kind { kExternal, kServerTime };

  Kind kind = Kind::kExternal;
  double cheap = 0.0;  // cost units (External) or server seconds (ServerTime)
  double full = 0.0;

  static CostModel external(double cheap_cost, double full_cost);
  static CostModel server_time(double cheap_time, double full_time);
};

enum class PolicyKind {
  kFifo,
  kSjf,
  kPsjf,
  kSrpt,
  kSpjf,
  kPspjf,
  kSprpt,
  kSprptBounce,
  kTwoClass,
  kSkipPredict,
  kDelayPredict,
  kTrail,
};

/// Immutable description of a single-server scheduling policy. Instances are
/// cheap to copy and safe to share between concurrent runs.
class RankPolicy {
 public:
  static RankPolicy fifo();
  static RankPolicy sjf();
  static RankPolicy psjf();
  static RankPolicy srpt();
  static RankPolicy spjf();
  static RankPolicy pspjf();
  static RankPolicy sprpt();
  static RankPolicy sprpt_bounce();
  /// THRESHOLD variant when use_oracle (short iff size <= threshold),
  /// PREDICTION variant otherwise (uses the job's class bit).
  /// With `sprpt_long` the long class is ordered by SPRPT instead of FIFO.
  /// With `lifo_short` each new short job goes to the front of the short
  /// class; under preemption it also displaces a running short job.
  static RankPolicy two_class(bool preemptive, bool use_oracle, double threshold = 1.0,
                              bool sprpt_long = false, bool lifo_short = false);
  /// Cheap 1-bit prediction for every job, full prediction only for jobs
  /// classified long. The class comes from the job's class bit, or from
  /// predicted_size <= threshold when the job carries no bit.
  static RankPolicy skip_predict(CostModel cost, double threshold);
  /// FIFO up to `limit` seconds of service, then predict and demote to SPRPT.
  static RankPolicy delay_predict(CostModel cost, double limit);
  /// SPRPT that refuses to preempt a job whose age reached c * prediction.
  static RankPolicy trail(double c);

  PolicyKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Whether a running job can ever be displaced by the ranking.
  bool preemptive() const { return preemptive_; }
  bool use_oracle() const { return use_oracle_; }
  bool sprpt_long() const { return sprpt_long_; }
  bool lifo_short() const { return lifo_short_; }
  double threshold() const { return threshold_; }
  double limit() const { return limit_; }
  double trail_c() const { return trail_c_; }
  const CostModel& cost() const { return cost_; }
  bool has_cost_model() const { return kind_ == PolicyKind::kSkipPredict || kind_ == PolicyKind::kDelayPredict; }
  /// True when the policy ranks on true sizes.
  bool is_oracle() const;

 private:
  RankPolicy(PolicyKind kind, std::string name, bool preemptive)
      : kind_(kind), name_(std::move(name)), preemptive_(preemptive) {}

  PolicyKind kind_;
  std::string name_;
  bool preemptive_;
  bool use_oracle_ = false;
  bool sprpt_long_ = false;
  bool lifo_short_ = false;
  double threshold_ = 0.0;
  double limit_ = 0.0;
  double trail_c_ = 1.0;
  CostModel cost_{};
};

/// Floor applied to DelayPredict's predicted remaining size at demotion.
inline constexpr double kDelayPredictRankFloor = 1e-9;

}  // namespace predq::policies

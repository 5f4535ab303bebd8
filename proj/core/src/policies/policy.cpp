#include "predq/policies/policy.hpp"

#include <sstream>

#include "predq/error.hpp"

namespace predq::policies {

CostModel CostModel::external(double cheap_cost, double full_cost) {
  if (!(cheap_cost >= 0.0 && full_cost >= 0.0)) throw ConfigError("prediction costs must be >= 0");
  return CostModel{Kind::kExternal, cheap_cost, full_cost};
}

CostModel CostModel::server_time(double cheap_time, double full_time) {
  if (!(cheap_time >= 0.0 && full_time >= 0.0)) throw ConfigError("prediction times must be >= 0");
  return CostModel{Kind::kServerTime, cheap_time, full_time};
}

RankPolicy RankPolicy::fifo() { return {PolicyKind::kFifo, "FIFO", false}; }
RankPolicy RankPolicy::sjf() { return {PolicyKind::kSjf, "SJF", false}; }
RankPolicy RankPolicy::psjf() { return {PolicyKind::kPsjf, "PSJF", true}; }
RankPolicy RankPolicy::srpt() { return {PolicyKind::kSrpt, "SRPT", true}; }
RankPolicy RankPolicy::spjf() { return {PolicyKind::kSpjf, "SPJF", false}; }
RankPolicy RankPolicy::pspjf() { return {PolicyKind::kPspjf, "PSPJF", true}; }
RankPolicy RankPolicy::sprpt() { return {PolicyKind::kSprpt, "SPRPT", true}; }
RankPolicy RankPolicy::sprpt_bounce() { return {PolicyKind::kSprptBounce, "SPRPT-BOUNCE", true}; }

RankPolicy RankPolicy::two_class(bool preemptive, bool use_oracle, double threshold, bool sprpt_long,
                                 bool lifo_short) {
  if (!(threshold > 0.0)) throw ConfigError("two-class threshold must be > 0");
  std::string name = use_oracle ? "THRESHOLD" : "PREDICTION";
  name += preemptive ? "-PREEMPT" : "-NO-PREEMPT";
  if (sprpt_long) name += "+SPRPT";
  if (lifo_short) name += "+LIFO";
  RankPolicy p(PolicyKind::kTwoClass, std::move(name), preemptive);
  p.use_oracle_ = use_oracle;
  p.threshold_ = threshold;
  p.sprpt_long_ = sprpt_long;
  p.lifo_short_ = lifo_short;
  return p;
}

RankPolicy RankPolicy::skip_predict(CostModel cost, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("SkipPredict threshold must be > 0");
  RankPolicy p(PolicyKind::kSkipPredict, "SKIPPREDICT", true);
  p.cost_ = cost;
  p.threshold_ = threshold;
  return p;
}

RankPolicy RankPolicy::delay_predict(CostModel cost, double limit) {
  if (!(limit > 0.0)) throw ConfigError("DelayPredict limit L must be > 0");
  RankPolicy p(PolicyKind::kDelayPredict, "DELAYPREDICT", true);
  p.cost_ = cost;
  p.limit_ = limit;
  return p;
}

RankPolicy RankPolicy::trail(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("Trail fraction c must lie in [0, 1]");
  std::ostringstream name;
  name << "TRAIL(c=" << c << ")";
  RankPolicy p(PolicyKind::kTrail, name.str(), true);
  p.trail_c_ = c;
  return p;
}

bool RankPolicy::is_oracle() const {
  switch (kind_) {
    case PolicyKind::kSjf:
    case PolicyKind::kPsjf:
    case PolicyKind::kSrpt:
      return true;
    case PolicyKind::kTwoClass:
      return use_oracle_;
    default:
      return false;
  }
}

}  // namespace predq::policies

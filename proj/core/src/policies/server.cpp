#include "predq/policies/server.hpp"

#include <algorithm>
#include <cmath>

#include "predq/error.hpp"

namespace predq::policies {

using workload::SizeClass;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Server::Server(RankPolicy policy, bool audit) : policy_(std::move(policy)), audit_(audit) {}

Server::Job Server::admit(const workload::JobSpec& spec) {
  Job job;
  job.spec = spec;
  job.seq = next_seq_++;
  switch (policy_.kind()) {
    case PolicyKind::kSkipPredict: {
      const CostModel& cost = policy_.cost();
      if (cost.kind == CostModel::Kind::kExternal) {
        job.cost += cost.cheap;
        const bool is_short = spec.class_bit ? *spec.class_bit == SizeClass::kShort
                                             : spec.predicted_size.value_or(0.0) <= policy_.threshold();
        if (is_short) {
          job.phase = Phase::kShortServe;
        } else {
          job.cost += cost.full;
          ++full_predictions_;
          job.phase = Phase::kLongServe;
        }
      } else {
        job.phase = Phase::kCheapPredict;
        job.phase_work_left = cost.cheap;
        job.prediction_work += cost.cheap;
      }
      break;
    }
    case PolicyKind::kDelayPredict:
      job.phase = Phase::kDelayFifo;
      break;
    default:
      job.phase = Phase::kServe;
      break;
  }
  return job;
}

Rank Server::rank_of(const Job& job) const {
  const JobView view{job.spec.predicted_size, job.spec.class_bit, job.age, PipelineStage::kReady, job.seq};
  const OracleView oracle{job.spec.true_size, job.age, job.seq};
  switch (policy_.kind()) {
    case PolicyKind::kFifo:
      return rank_fifo(job.seq);
    case PolicyKind::kSjf:
      return rank_sjf(oracle);
    case PolicyKind::kPsjf:
      return rank_psjf(oracle);
    case PolicyKind::kSrpt:
      return rank_srpt(oracle);
    case PolicyKind::kSpjf:
      return rank_spjf(view);
    case PolicyKind::kPspjf:
      return rank_pspjf(view);
    case PolicyKind::kSprpt:
    case PolicyKind::kTrail:
      return rank_sprpt(view);
    case PolicyKind::kSprptBounce:
      return rank_sprpt_bounce(view);
    case PolicyKind::kTwoClass: {
      Rank r = rank_two_class(view, oracle, policy_.threshold(), policy_.use_oracle());
      if (policy_.sprpt_long() && r.level == 1) r.value = rank_sprpt(view).value;
      if (policy_.lifo_short() && r.level == 0) r.value = -static_cast<double>(job.seq);
      return r;
    }
    case PolicyKind::kSkipPredict:
      switch (job.phase) {
        case Phase::kShortServe:
          return Rank{0, 0.0, job.seq};
        case Phase::kCheapPredict:
          return Rank{1, 0.0, job.seq};
        case Phase::kFullPredict:
          return Rank{2, 0.0, job.seq};
        default: {
          Rank r = rank_sprpt(view);
          r.level = 3;
          return r;
        }
      }
    case PolicyKind::kDelayPredict:
      switch (job.phase) {
        case Phase::kDelayFifo:
          return Rank{0, 0.0, job.seq};
        case Phase::kFullPredict:
          return Rank{1, 0.0, job.seq};
        default: {
          if (!job.spec.predicted_size) throw LogicError("DelayPredict requires a predicted size");
          const double limit = policy_.limit();
          const double remaining_at_limit = std::max(*job.spec.predicted_size - limit, kDelayPredictRankFloor);
          return Rank{2, remaining_at_limit - (job.age - limit), job.seq};
        }
      }
  }
  throw LogicError("unknown policy kind");
}

bool Server::preemptible(const Job& job) const {
  if (prediction_phase(job.phase)) return false;
  if (!policy_.preemptive()) return false;
  if (policy_.kind() == PolicyKind::kTrail) {
    if (!job.spec.predicted_size) throw LogicError("Trail requires a predicted size");
    return job.age < policy_.trail_c() * *job.spec.predicted_size;
  }
  return true;
}

double Server::serve_end_age(const Job& job) const {
  if (job.phase == Phase::kDelayFifo) return std::min(policy_.limit(), job.spec.true_size);
  return job.spec.true_size;
}

double Server::remaining_work(const Job& job) const {
  if (prediction_phase(job.phase)) return std::max(job.phase_work_left, 0.0);
  return std::max(serve_end_age(job) - job.age, 0.0);
}

void Server::enter_long_class(Job& job) {
  job.phase = policy_.kind() == PolicyKind::kSkipPredict ? Phase::kLongServe : Phase::kDelayLong;
}

bool Server::finish_phase(Job& job) {
  const CostModel& cost = policy_.cost();
  switch (job.phase) {
    case Phase::kServe:
    case Phase::kShortServe:
    case Phase::kLongServe:
    case Phase::kDelayLong:
      return true;
    case Phase::kCheapPredict: {
      const bool is_short = job.spec.class_bit
                                ? *job.spec.class_bit == SizeClass::kShort
                                : job.spec.predicted_size.value_or(0.0) <= policy_.threshold();
      if (is_short) {
        job.phase = Phase::kShortServe;
      } else {
        job.phase = Phase::kFullPredict;
        job.phase_work_left = cost.full;
        job.prediction_work += cost.full;
        ++full_predictions_;
      }
      return false;
    }
    case Phase::kFullPredict:
      enter_long_class(job);
      return false;
    case Phase::kDelayFifo:
      if (job.age >= job.spec.true_size) return true;
      if (cost.kind == CostModel::Kind::kExternal) {
        job.cost += cost.full;
        ++full_predictions_;
        job.phase = Phase::kDelayLong;
      } else {
        job.phase = Phase::kFullPredict;
        job.phase_work_left = cost.full;
        job.prediction_work += cost.full;
        ++full_predictions_;
      }
      return false;
  }
  throw LogicError("unknown phase");
}

void Server::sync(double now) {
  if (running_) {
    const double dt = now - last_sync_;
    if (prediction_phase(running_->phase)) {
      running_->phase_work_left -= dt;
    } else {
      running_->age += dt;
    }
    busy_time_ += dt;
  }
  last_sync_ = now;
}

void Server::start(Job job, double now) {
  if (job.first_service < 0.0) job.first_service = now;
  running_ = std::move(job);
}

void Server::dispatch(double now) {
  if (running_ || waiting_.empty()) return;
  Job next = waiting_.top().job;
  waiting_.pop();
  start(std::move(next), now);
}

void Server::reschedule(double now) {
  if (!running_) {
    event_time_ = kInf;
    timer_ = Timer::kNone;
    return;
  }
  const Job& job = *running_;
  event_time_ = now + remaining_work(job);
  timer_ = Timer::kPhaseEnd;
  // Bounce ranks climb back up after age z; schedule the instant the running
  // job's rank meets the best waiting rank.
  if (policy_.kind() == PolicyKind::kSprptBounce && !waiting_.empty()) {
    const Rank& best = waiting_.top().rank;
    const double z = *job.spec.predicted_size;
    if (best.level == 0 && best.value < z) {
      const double cross_age = z + best.value;
      if (cross_age > job.age && cross_age < job.spec.true_size) {
        const double t = now + (cross_age - job.age);
        if (t < event_time_) {
          event_time_ = t;
          timer_ = Timer::kCrossing;
          crossing_age_ = cross_age;
        }
      }
    }
  }
}

void Server::audit_min_rank() const {
  if (!audit_ || !running_ || waiting_.empty() || !preemptible(*running_)) return;
  if (waiting_.top().rank < rank_of(*running_)) {
    throw LogicError("min-rank invariant violated: waiting job outranks the job in service");
  }
}

void Server::arrive(const workload::JobSpec& spec, double now) {
  sync(now);
  Job job = admit(spec);
  if (spec.class_bit) ++class_count_[static_cast<int>(*spec.class_bit)];
  if (!running_) {
    start(std::move(job), now);
  } else {
    const Rank incoming = rank_of(job);
    if (preemptible(*running_) && incoming < rank_of(*running_)) {
      Job displaced = std::move(*running_);
      running_.reset();
      waiting_.push(Entry{rank_of(displaced), std::move(displaced)});
      ++preemptions_;
      start(std::move(job), now);
    } else {
      waiting_.push(Entry{incoming, std::move(job)});
    }
  }
  reschedule(now);
  audit_min_rank();
}

void Server::on_event(double now, std::vector<ServedJob>& out) {
  if (!running_) throw LogicError("server timer fired while idle");
  sync(now);
  Job job = std::move(*running_);
  running_.reset();
  if (timer_ == Timer::kCrossing) {
    // The crossing age is only exact up to rounding, and a tie still favors
    // the older job, so step just past it until the waiting job wins.
    job.age = crossing_age_;
    for (int i = 0; i < 64 && !(waiting_.top().rank < rank_of(job)); ++i) job.age = std::nextafter(job.age, kInf);
    Job next = waiting_.top().job;
    waiting_.pop();
    waiting_.push(Entry{rank_of(job), std::move(job)});
    ++preemptions_;
    start(std::move(next), now);
  } else {
    if (prediction_phase(job.phase)) {
      job.phase_work_left = 0.0;
    } else {
      job.age = serve_end_age(job);
    }
    if (finish_phase(job)) {
      if (job.spec.class_bit) --class_count_[static_cast<int>(*job.spec.class_bit)];
      completed_work_ += job.spec.true_size + job.prediction_work;
      out.push_back(ServedJob{job.spec, job.first_service, now, job.cost});
    } else {
      waiting_.push(Entry{rank_of(job), std::move(job)});
    }
    dispatch(now);
  }
  reschedule(now);
  audit_min_rank();
}

}  // namespace predq::policies

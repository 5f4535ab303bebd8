#include "predq/policies/queue_model.hpp"
#include "predq/policies/single_queue.hpp"

#include <cmath>
#include <limits>

#include "predq/engine/simulation.hpp"

namespace predq::policies {

QueueModel::QueueModel(workload::JobSource& source, std::vector<Server> servers, Router router)
    : source_(source), servers_(std::move(servers)), router_(std::move(router)) {
  if (servers_.empty()) throw ConfigError("queue model needs at least one server");
  if (servers_.size() > 1 && !router_) throw ConfigError("multiple servers need a router");
  epochs_.assign(servers_.size(), 0);
  armed_.assign(servers_.size(), std::numeric_limits<double>::infinity());
}

void QueueModel::start(const engine::RunControl& control) {
  control_ = control;
  pull_arrival();
}

void QueueModel::pull_arrival() {
  if (source_exhausted_) return;
  pending_ = source_.next();
  if (!pending_) {
    source_exhausted_ = true;
    return;
  }
  events_.schedule(pending_->arrival_time, Payload{Payload::Kind::kArrival, 0, 0});
}

void QueueModel::rearm(std::size_t k) {
  const double t = servers_[k].next_event_time();
  if (t == armed_[k]) return;
  ++epochs_[k];
  armed_[k] = t;
  if (std::isfinite(t)) {
    events_.schedule(t, Payload{Payload::Kind::kTimer, static_cast<std::uint32_t>(k), epochs_[k]});
  }
}

bool QueueModel::step() {
  if (events_.empty()) return false;
  const auto ev = events_.pop();
  const double now = ev.time;
  if (ev.payload.kind == Payload::Kind::kArrival) {
    const workload::JobSpec job = *pending_;
    const std::size_t k = servers_.size() == 1 ? 0 : router_(job, servers_);
    servers_[k].arrive(job, now);
    ++arrivals_;
    ++in_system_;
    if (in_system_ > peak_) peak_ = in_system_;
    pull_arrival();
    rearm(k);
    return true;
  }
  const std::size_t k = ev.payload.server;
  if (ev.payload.epoch != epochs_[k]) return true;  // superseded timer
  armed_[k] = std::numeric_limits<double>::infinity();
  servers_[k].on_event(now, served_);
  for (const ServedJob& s : served_) {
    --in_system_;
    ++departures_;
    if (control_.is_measured(s.spec.id)) {
      records_.push_back(engine::CompletionRecord{s.spec.id, s.spec.arrival_time, s.first_service,
                                                  s.completion, s.cost});
      ++recorded_;
      measured_cost_ += s.cost;
    }
  }
  served_.clear();
  rearm(k);
  return true;
}

bool QueueModel::finished() const {
  if (recorded_ >= control_.measured_jobs) return true;
  return source_exhausted_ && in_system_ == 0;
}

QueueRunStats QueueModel::stats() const {
  QueueRunStats s;
  s.end_time = events_.now();
  for (const Server& srv : servers_) {
    s.busy_time += srv.busy_time();
    s.completed_work += srv.completed_work();
    s.full_predictions += srv.full_predictions();
    s.preemptions += srv.preemptions();
  }
  s.arrivals = arrivals_;
  s.departures = departures_;
  s.peak_in_system = peak_;
  s.measured_cost = measured_cost_;
  return s;
}

SingleQueueResult simulate_single_queue(workload::JobSource& source, const RankPolicy& policy,
                                        const engine::RunControl& control, bool audit) {
  std::vector<Server> servers;
  servers.emplace_back(policy, audit);
  QueueModel model(source, std::move(servers));
  SingleQueueResult result;
  result.records = engine::run(model, control);
  result.stats = model.stats();
  return result;
}

}  // namespace predq::policies

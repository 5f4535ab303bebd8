#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "predq/policies/policy.hpp"
#include "predq/policies/rank.hpp"
#include "predq/workload/job.hpp"

namespace predq::policies {

/// Work segment a job is in. Prediction phases occupy the server for a fixed
/// time and cannot be preempted.
enum class Phase : std::uint8_t {
  kServe,
  kCheapPredict,
  kFullPredict,
  kShortServe,
  kLongServe,
  kDelayFifo,
  kDelayLong,
};

struct ServedJob {
  workload::JobSpec spec;
  double first_service = 0.0;
  double completion = 0.0;
  double cost = 0.0;
};

/// A single preemptive-priority server driven by a RankPolicy. The owner
/// feeds arrivals and fires the server's own timer at next_event_time();
/// ranks only change at those epochs or at explicitly scheduled crossings.
class Server {
 public:
  explicit Server(RankPolicy policy, bool audit = false);

  void arrive(const workload::JobSpec& job, double now);

  /// Absolute time of the next phase end or rank crossing; +inf when idle.
  double next_event_time() const { return event_time_; }

  /// Handles the timer due at `now`; departed jobs are appended to `out`.
  void on_event(double now, std::vector<ServedJob>& out);

  std::size_t in_system() const { return waiting_.size() + (running_ ? 1 : 0); }
  std::size_t count(workload::SizeClass c) const { return class_count_[static_cast<int>(c)]; }
  bool busy() const { return running_.has_value(); }

  /// Server time spent on any work, including predictions.
  double busy_time() const { return busy_time_; }
  /// Total work (sizes plus prediction time) of departed jobs.
  double completed_work() const { return completed_work_; }
  std::uint64_t full_predictions() const { return full_predictions_; }
  std::uint64_t preemptions() const { return preemptions_; }

  const RankPolicy& policy() const { return policy_; }

 private:
  struct Job {
    workload::JobSpec spec;
    std::uint64_t seq = 0;
    double age = 0.0;
    double phase_work_left = 0.0;
    double prediction_work = 0.0;
    double first_service = -1.0;
    double cost = 0.0;
    Phase phase = Phase::kServe;
  };
  struct Entry {
    Rank rank;
    Job job;
  };
  struct EntryAfter {
    bool operator()(const Entry& a, const Entry& b) const { return b.rank < a.rank; }
  };
  enum class Timer { kNone, kPhaseEnd, kCrossing };

  Job admit(const workload::JobSpec& spec);
  Rank rank_of(const Job& job) const;
  bool preemptible(const Job& job) const;
  double serve_end_age(const Job& job) const;
  double remaining_work(const Job& job) const;
  bool prediction_phase(Phase p) const { return p == Phase::kCheapPredict || p == Phase::kFullPredict; }
  /// Moves the job past a finished phase. Returns true when it departs.
  bool finish_phase(Job& job);
  void enter_long_class(Job& job);

  void sync(double now);
  void start(Job job, double now);
  void dispatch(double now);
  void reschedule(double now);
  void audit_min_rank() const;

  RankPolicy policy_;
  bool audit_;
  std::optional<Job> running_;
  std::priority_queue<Entry, std::vector<Entry>, EntryAfter> waiting_;
  double last_sync_ = 0.0;
  double event_time_ = std::numeric_limits<double>::infinity();
  Timer timer_ = Timer::kNone;
  double crossing_age_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::size_t class_count_[2] = {0, 0};
  double busy_time_ = 0.0;
  double completed_work_ = 0.0;
  std::uint64_t full_predictions_ = 0;
  std::uint64_t preemptions_ = 0;
};

}  // namespace predq::policies

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "predq/engine/event_queue.hpp"
#include "predq/engine/records.hpp"
#include "predq/engine/run_control.hpp"
#include "predq/policies/server.hpp"
#include "predq/workload/source.hpp"

namespace predq::policies {

struct QueueRunStats {
  double end_time = 0.0;
  double busy_time = 0.0;       // summed over servers
  double completed_work = 0.0;  // summed over servers
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
  std::uint64_t peak_in_system = 0;
  std::uint64_t full_predictions = 0;
  std::uint64_t preemptions = 0;
  double measured_cost = 0.0;
};

/// Event loop over one or more Servers fed by a single JobSource. A router
/// picks the server for each arrival; with one server no router is needed.
class QueueModel {
 public:
  using Router = std::function<std::size_t(const workload::JobSpec&, const std::vector<Server>&)>;

  QueueModel(workload::JobSource& source, std::vector<Server> servers, Router router = {});

  void start(const engine::RunControl& control);
  bool step();
  bool finished() const;
  double now() const { return events_.now(); }
  std::uint64_t in_system() const { return in_system_; }
  engine::Records take_records() { return std::move(records_); }

  QueueRunStats stats() const;
  const std::vector<Server>& servers() const { return servers_; }

 private:
  struct Payload {
    enum class Kind : std::uint8_t { kArrival, kTimer } kind;
    std::uint32_t server;
    std::uint64_t epoch;
  };

  void pull_arrival();
  void rearm(std::size_t server);

  workload::JobSource& source_;
  std::vector<Server> servers_;
  Router router_;
  engine::RunControl control_;
  engine::EventQueue<Payload> events_;
  std::optional<workload::JobSpec> pending_;
  bool source_exhausted_ = false;
  std::vector<std::uint64_t> epochs_;
  std::vector<double> armed_;
  std::vector<ServedJob> served_;
  engine::Records records_;
  std::uint64_t recorded_ = 0;
  std::uint64_t in_system_ = 0;
  std::uint64_t arrivals_ = 0;
  std::uint64_t departures_ = 0;
  std::uint64_t peak_ = 0;
  double measured_cost_ = 0.0;
};

}  // namespace predq::policies

#pragma once

#include "predq/engine/records.hpp"
#include "predq/engine/run_control.hpp"
#include "predq/policies/policy.hpp"
#include "predq/policies/queue_model.hpp"
#include "predq/workload/source.hpp"

namespace predq::policies {

struct SingleQueueResult {
  engine::Records records;
  QueueRunStats stats;
};

/// M/G/1 (or trace-driven) run of one policy. With `audit` set, every
/// decision epoch checks that a preemptible job in service has minimal rank.
SingleQueueResult simulate_single_queue(workload::JobSource& source, const RankPolicy& policy,
                                        const engine::RunControl& control, bool audit = false);

}  // namespace predq::policies

#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncsched/engine.hpp"
#include "ncsched/lp.hpp"
#include "ncsched/schedule.hpp"

namespace ncsched {

// Column sets of the CSV outputs. Bump the version when a header changes.
inline constexpr int kCsvFormatVersion = 1;

/// slot,Q_0,...,Q_{M-1},total,lyapunov,schedule_id,delivered,dropped
std::string trace_csv_header(int m);
void write_trace_row(std::ostream& os, const SlotRecord& record);

/// value,replicates,avg_total_backlog,throughput_pct,throughput_per_slot,drop_pct,...
std::string sweep_csv_header(SweepParameter parameter);
void write_sweep_csv(std::ostream& os, SweepParameter parameter, std::span<const SweepRow> rows);

/// schedule,q_0,...,q_{M-1} followed by one 0/1 row per schedule.
void write_schedules_csv(std::ostream& os, int n_users, const std::vector<Schedule>& schedules);

nlohmann::json summary_json(const Metrics& m);
nlohmann::json capacity_json(int n_users, std::span<const double> eps,
                             const StabilitySolution* at_lambda, double lambda);

}  // namespace ncsched

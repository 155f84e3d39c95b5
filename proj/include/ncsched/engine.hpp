#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncsched/channel.hpp"
#include "ncsched/core_model.hpp"
#include "ncsched/schedule.hpp"
#include "ncsched/schedulers.hpp"

namespace ncsched {

struct SimConfig {
    int n_users = 3;
    ChannelModel channel = ChannelModel::fixed({0.2, 0.2, 0.2});
    double lambda = 0.0;
    SchedulerConfig scheduler;
    std::optional<std::int64_t> deadline;  // H in slots; packets with age >= H are dropped
    std::int64_t slots = 200000;
    std::uint64_t seed = 0;
    double warmup_fraction = 0.5;
    MoveInsertion move_insertion = MoveInsertion::tail;
    int schedule_cap = kDefaultScheduleCap;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;

    bool operator==(const SimConfig&) const = default;
};

struct Metrics {
    std::int64_t slots = 0;
    double avg_total_backlog = 0.0;
    std::vector<std::int64_t> backlog_trace;  // sum of Q_i after each slot
    std::vector<double> lyapunov_trace;       // 1/2 sum of Q_i^2 after each slot
    std::int64_t arrived = 0;
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
    std::int64_t residual = 0;  // still queued at the end
    std::int64_t idle_slots = 0;
    double throughput_pct = 0.0;      // delivered / arrived * 100
    double throughput_per_slot = 0.0;  // delivered / slots
    double drop_pct = 0.0;            // dropped / arrived * 100
};

/// Snapshot handed to a trace observer at the end of every slot.
struct SlotRecord {
    std::int64_t slot = 0;
    std::span<const std::int64_t> backlog;
    std::int64_t total = 0;
    double lyapunov = 0.0;
    int schedule_id = -1;  // -1 when idle
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
};

using SlotObserver = std::function<void(const SlotRecord&)>;

/// Runs one simulation. Each slot: deadline drops, Bernoulli arrival into
/// q_0, scheduling decision, channel feedback, relocation, bookkeeping.
Metrics run(const SimConfig& cfg, const SlotObserver& observer = {});

struct StabilityCriteria {
    double max_slope = 1e-3;       // packets per slot
    double max_level_fraction = 0.05;  // final windowed average must stay below this * T
    int windows = 50;
    std::size_t min_length = 10000;
};

struct StabilityVerdict {
    bool stable = false;
    double slope = 0.0;
    double final_level = 0.0;
};

/// Least-squares slope of the windowed post-warmup backlog average.
/// Throws std::invalid_argument when the trace is shorter than min_length.
StabilityVerdict is_stable(std::span<const std::int64_t> trace, double warmup_fraction,
                           const StabilityCriteria& criteria = {});

struct LambdaSearch {
    double tolerance = 0.01;
    int seeds = 3;
    int threads = 1;
    StabilityCriteria criteria;
};

/// Bisection on lambda over is_stable, majority vote across seeds.
double estimate_lambda_max(const SimConfig& base, const LambdaSearch& search = {});

enum class SweepParameter { lambda, eps, deadline, beta };
SweepParameter parse_sweep_parameter(const std::string& s);
std::string to_string(SweepParameter p);

struct SweepRow {
    double value = 0.0;
    int replicates = 0;
    double avg_total_backlog = 0.0;
    double throughput_pct = 0.0;
    double throughput_per_slot = 0.0;
    double drop_pct = 0.0;
    double arrived = 0.0;
    double delivered = 0.0;
    double dropped = 0.0;
    double idle_slots = 0.0;
};

/// Returns `base` with the swept parameter set to `value`. eps sets a
/// symmetric fixed channel; beta switches the scheduler to lys-beta.
SimConfig with_parameter(const SimConfig& base, SweepParameter parameter, double value);

/// Seed for replicate r of grid point k: base seed + k * replicates + r, so
/// point 0 replicate 0 reuses the base seed.
std::uint64_t sweep_seed(std::uint64_t base_seed, std::size_t point, int replicate, int replicates);

std::vector<SweepRow> sweep(const SimConfig& base, SweepParameter parameter,
                            std::span<const double> grid, int replicates = 1, int threads = 1);

/// Runs fn(0..count-1) on up to `threads` worker threads.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace ncsched

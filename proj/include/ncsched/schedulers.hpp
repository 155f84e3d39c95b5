#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncsched/core_model.hpp"
#include "ncsched/rng.hpp"
#include "ncsched/schedule.hpp"

namespace ncsched {

enum class SchedulerKind { arq, lps, lys, lys_beta };

/// full: backlog-weighted drift summed over every sub-queue, including the
/// flow a schedule pushes into destination sub-queues. reduced: only the
/// schedule's own sub-queues, where cross-arrivals vanish.
enum class DvMode { reduced, full };

/// Sign applied to beta * age. prioritize_aged subtracts it, so the schedule
/// holding the oldest head-of-line packet is favoured; literal adds it.
enum class AgeSign { prioritize_aged, literal };

/// static: LP solved once on mean erasure rates. per_slot: re-solved on the
/// erasure rates observed each slot.
enum class LpsRefresh { static_mean, per_slot };

/// Which erasure rates the deciders see: this slot's draw, or the long-run mean.
enum class EpsView { current, mean };

struct SchedulerConfig {
    SchedulerKind kind = SchedulerKind::lys;
    double beta = 0.0;
    DvMode dv_mode = DvMode::full;
    AgeSign age_sign = AgeSign::prioritize_aged;
    LpsRefresh lps_refresh = LpsRefresh::static_mean;
    EpsView eps_view = EpsView::current;

    bool operator==(const SchedulerConfig&) const = default;
};

std::string to_string(SchedulerKind k);
std::string to_string(DvMode m);
std::string to_string(AgeSign s);
std::string to_string(LpsRefresh r);
std::string to_string(EpsView v);
/// Inverse of to_string; throw std::invalid_argument on unknown names.
SchedulerKind parse_scheduler_kind(const std::string& s);
DvMode parse_dv_mode(const std::string& s);
AgeSign parse_age_sign(const std::string& s);
LpsRefresh parse_lps_refresh(const std::string& s);
EpsView parse_eps_view(const std::string& s);

struct Decision {
    std::optional<int> schedule;   // index into the schedule table; empty = idle
    std::vector<double> dv_values;  // per-schedule decision values (LyS only)

    bool idle() const { return !schedule.has_value(); }
};

double dv_reduced(const SubQueueLayout& layout, const Schedule& schedule,
                  std::span<const std::int64_t> backlog, std::span<const double> eps, double lambda);

double dv_full(const SubQueueLayout& layout, const Schedule& schedule,
               std::span<const std::int64_t> backlog, std::span<const double> eps, double lambda);

/// Largest head-of-line age among the schedule's non-empty sub-queues, 0 if none.
std::int64_t oldest_head_age(const QueueSystem& state, const Schedule& schedule, std::int64_t slot);

/// Argmin of the decision value over all schedules; ties go to the lowest id.
Decision decide_lys(const QueueSystem& state, const std::vector<Schedule>& schedules,
                    std::span<const double> eps, double lambda, const SchedulerConfig& cfg);

/// Drift-plus-penalty variant: DV'_j = sign * beta * a_o(j) + DV_j.
Decision decide_lys_beta(const QueueSystem& state, const std::vector<Schedule>& schedules,
                         std::span<const double> eps, double lambda, std::int64_t slot,
                         const SchedulerConfig& cfg);

/// Samples schedule j with probability p[j]. Idle if its sub-queues are all
/// empty; there is no resampling. Throws if p does not sum to 1 within 1e-6.
Decision decide_lps(const QueueSystem& state, const std::vector<Schedule>& schedules,
                    std::span<const double> p, Rng& rng);

/// Uncoded baseline: one FIFO, the head is retransmitted until every user
/// has acknowledged it. ACKs accumulate across retransmissions.
struct ArqQueue {
    int n_users = 1;
    std::deque<Packet> packets;
    UserSet acked;  // users that already hold the head packet

    std::int64_t backlog() const { return static_cast<std::int64_t>(packets.size()); }
};

struct ArqDecision {
    std::optional<std::uint64_t> packet_id;  // empty = idle
    UserSet intended;                        // users still missing the head

    bool idle() const { return !packet_id.has_value(); }
};

ArqDecision decide_arq(const ArqQueue& state);

/// Applies feedback to the ARQ head; returns true if it departed.
bool arq_feedback(ArqQueue& state, ReceptionOutcome outcome);

}  // namespace ncsched

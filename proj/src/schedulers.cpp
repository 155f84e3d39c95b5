#include "ncsched/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ncsched/rates.hpp"

namespace ncsched {

std::string to_string(SchedulerKind k) {
    switch (k) {
        case SchedulerKind::arq: return "arq";
        case SchedulerKind::lps: return "lps";
        case SchedulerKind::lys: return "lys";
        case SchedulerKind::lys_beta: return "lys-beta";
    }
    return "?";
}

std::string to_string(DvMode m) { return m == DvMode::reduced ? "reduced" : "full"; }
std::string to_string(AgeSign s) {
    return s == AgeSign::prioritize_aged ? "prioritize-aged" : "literal";
}
std::string to_string(LpsRefresh r) { return r == LpsRefresh::static_mean ? "static" : "per-slot"; }
std::string to_string(EpsView v) { return v == EpsView::current ? "current" : "mean"; }

SchedulerKind parse_scheduler_kind(const std::string& s) {
    if (s == "arq") return SchedulerKind::arq;
    if (s == "lps") return SchedulerKind::lps;
    if (s == "lys") return SchedulerKind::lys;
    if (s == "lys-beta") return SchedulerKind::lys_beta;
    throw std::invalid_argument("unknown scheduler kind '" + s + "' (arq|lps|lys|lys-beta)");
}

DvMode parse_dv_mode(const std::string& s) {
    if (s == "reduced") return DvMode::reduced;
    if (s == "full") return DvMode::full;
    throw std::invalid_argument("unknown dv_mode '" + s + "' (reduced|full)");
}

AgeSign parse_age_sign(const std::string& s) {
    if (s == "prioritize-aged") return AgeSign::prioritize_aged;
    if (s == "literal") return AgeSign::literal;
    throw std::invalid_argument("unknown age_sign '" + s + "' (prioritize-aged|literal)");
}

LpsRefresh parse_lps_refresh(const std::string& s) {
    if (s == "static") return LpsRefresh::static_mean;
    if (s == "per-slot") return LpsRefresh::per_slot;
    throw std::invalid_argument("unknown lps_refresh '" + s + "' (static|per-slot)");
}

EpsView parse_eps_view(const std::string& s) {
    if (s == "current") return EpsView::current;
    if (s == "mean") return EpsView::mean;
    throw std::invalid_argument("unknown eps_view '" + s + "' (current|mean)");
}

double dv_reduced(const SubQueueLayout& layout, const Schedule& schedule,
                  std::span<const std::int64_t> backlog, std::span<const double> eps, double lambda) {
    double dv = 0.0;
    for (int i : schedule.parts) {
        if (backlog[i] == 0) continue;
        const double arrivals = (i == 0) ? lambda : 0.0;
        const double departures = success_probability(layout.index_set(i), eps);
        dv += static_cast<double>(backlog[i]) * (arrivals - departures);
    }
    return dv;
}

double dv_full(const SubQueueLayout& layout, const Schedule& schedule,
               std::span<const std::int64_t> backlog, std::span<const double> eps, double lambda) {
    std::vector<bool> occupied(backlog.size());
    for (std::size_t i = 0; i < backlog.size(); ++i) occupied[i] = backlog[i] > 0;
    const RateVector r = expected_rates(layout, schedule, occupied, eps, lambda);
    double dv = 0.0;
    for (std::size_t k = 0; k < backlog.size(); ++k)
        dv += static_cast<double>(backlog[k]) * r.a[k];
    for (int i : schedule.parts) dv -= static_cast<double>(backlog[i]) * r.d[i];
    return dv;
}

std::int64_t oldest_head_age(const QueueSystem& state, const Schedule& schedule, std::int64_t slot) {
    std::int64_t oldest = 0;
    for (int i : schedule.parts) {
        const auto& packets = state.queue(i).packets;
        if (!packets.empty()) oldest = std::max(oldest, packets.front().age(slot));
    }
    return oldest;
}

namespace {

bool serves_anything(const QueueSystem& state, const Schedule& schedule) {
    for (int i : schedule.parts)
        if (!state.queue(i).packets.empty()) return true;
    return false;
}

Decision argmin(const QueueSystem& state, const std::vector<Schedule>& schedules,
                std::vector<double> values) {
    Decision d;
    d.dv_values = std::move(values);
    int best = -1;
    for (int j = 0; j < static_cast<int>(d.dv_values.size()); ++j)
        if (best < 0 || d.dv_values[j] < d.dv_values[best]) best = j;
    if (best >= 0 && serves_anything(state, schedules[best])) d.schedule = best;
    return d;
}

std::vector<double> decision_values(const QueueSystem& state, const std::vector<Schedule>& schedules,
                                    std::span<const double> eps, double lambda, DvMode mode) {
    const auto backlog = state.backlog_vector();
    std::vector<double> values(schedules.size());
    for (std::size_t j = 0; j < schedules.size(); ++j)
        values[j] = mode == DvMode::reduced
                        ? dv_reduced(state.layout(), schedules[j], backlog, eps, lambda)
                        : dv_full(state.layout(), schedules[j], backlog, eps, lambda);
    return values;
}

}  // namespace

Decision decide_lys(const QueueSystem& state, const std::vector<Schedule>& schedules,
                    std::span<const double> eps, double lambda, const SchedulerConfig& cfg) {
    return argmin(state, schedules, decision_values(state, schedules, eps, lambda, cfg.dv_mode));
}

Decision decide_lys_beta(const QueueSystem& state, const std::vector<Schedule>& schedules,
                         std::span<const double> eps, double lambda, std::int64_t slot,
                         const SchedulerConfig& cfg) {
    auto values = decision_values(state, schedules, eps, lambda, cfg.dv_mode);
    if (cfg.beta != 0.0) {
        const double sign = cfg.age_sign == AgeSign::prioritize_aged ? -1.0 : 1.0;
        for (std::size_t j = 0; j < schedules.size(); ++j)
            values[j] += sign * cfg.beta *
                         static_cast<double>(oldest_head_age(state, schedules[j], slot));
    }
    return argmin(state, schedules, std::move(values));
}

Decision decide_lps(const QueueSystem& state, const std::vector<Schedule>& schedules,
                    std::span<const double> p, Rng& rng) {
    if (p.size() != schedules.size())
        throw std::invalid_argument("LPS probability vector does not match the schedule table");
    double total = 0.0;
    for (double v : p) total += v;
    if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument("LPS probabilities sum to " + std::to_string(total) +
                                    ", expected 1");

    const double u = rng.uniform() * total;
    int chosen = -1;
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0.0) continue;
        chosen = static_cast<int>(j);  // rounding fallback: last positive entry
        acc += p[j];
        if (u < acc) break;
    }

    Decision d;
    if (serves_anything(state, schedules[chosen])) d.schedule = chosen;
    return d;
}

ArqDecision decide_arq(const ArqQueue& state) {
    ArqDecision d;
    if (state.packets.empty()) return d;
    d.packet_id = state.packets.front().id;
    d.intended = UserSet::full(state.n_users).minus(state.acked);
    return d;
}

bool arq_feedback(ArqQueue& state, ReceptionOutcome outcome) {
    if (state.packets.empty()) return false;
    state.acked = state.acked | outcome.received;
    if (state.acked == UserSet::full(state.n_users)) {
        state.packets.pop_front();
        state.acked = UserSet{};
        return true;
    }
    return false;
}

}  // namespace ncsched

#include "ncsched/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ncsched/lp.hpp"
#include "ncsched/rng.hpp"

namespace ncsched {

void SimConfig::validate() const {
    if (n_users < 1 || n_users > schedule_cap)
        throw std::invalid_argument("n_users must be in [1, " + std::to_string(schedule_cap) + "]");
    if (channel.n_users() != n_users)
        throw std::invalid_argument("channel describes " + std::to_string(channel.n_users()) +
                                    " users, expected " + std::to_string(n_users));
    channel.validate();
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
    if (slots < 1) throw std::invalid_argument("slots must be at least 1");
    if (deadline && *deadline < 1) throw std::invalid_argument("deadline must be at least 1");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
        throw std::invalid_argument("warmup_fraction must lie in [0, 1)");
    if (scheduler.beta < 0.0) throw std::invalid_argument("beta must be non-negative");
}

namespace {

struct SlotTally {
    int schedule_id = -1;
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
};

template <typename Container>
std::int64_t drop_expired(Container& packets, std::int64_t slot, std::int64_t deadline) {
    const auto before = packets.size();
    std::erase_if(packets, [&](const Packet& p) { return p.age(slot) >= deadline; });
    return static_cast<std::int64_t>(before - packets.size());
}

class Recorder {
public:
    Recorder(Metrics& m, const SlotObserver& observer) : m_(m), observer_(observer) {}

    void record(std::int64_t slot, std::span<const std::int64_t> backlog, const SlotTally& tally) {
        std::int64_t total = 0;
        double lyap = 0.0;
        for (auto q : backlog) {
            total += q;
            lyap += 0.5 * static_cast<double>(q) * static_cast<double>(q);
        }
        m_.backlog_trace.push_back(total);
        m_.lyapunov_trace.push_back(lyap);
        m_.delivered += tally.delivered;
        m_.dropped += tally.dropped;
        if (tally.schedule_id < 0) ++m_.idle_slots;
        if (observer_)
            observer_(SlotRecord{slot, backlog, total, lyap, tally.schedule_id, tally.delivered,
                                 tally.dropped});
    }

private:
    Metrics& m_;
    const SlotObserver& observer_;
};

void finalize(Metrics& m) {
    double sum = 0.0;
    for (auto v : m.backlog_trace) sum += static_cast<double>(v);
    m.avg_total_backlog = m.slots > 0 ? sum / static_cast<double>(m.slots) : 0.0;
    m.residual = m.backlog_trace.empty() ? 0 : m.backlog_trace.back();
    if (m.arrived > 0) {
        m.throughput_pct = 100.0 * static_cast<double>(m.delivered) / static_cast<double>(m.arrived);
        m.drop_pct = 100.0 * static_cast<double>(m.dropped) / static_cast<double>(m.arrived);
    }
    m.throughput_per_slot =
        m.slots > 0 ? static_cast<double>(m.delivered) / static_cast<double>(m.slots) : 0.0;
}

Metrics run_arq(const SimConfig& cfg, const ChannelModel& channel, const SlotObserver& observer) {
    Metrics m;
    m.slots = cfg.slots;
    m.backlog_trace.reserve(cfg.slots);
    m.lyapunov_trace.reserve(cfg.slots);
    Recorder recorder(m, observer);

    Rng arrivals = Rng::stream(cfg.seed, Stream::arrivals);
    Rng chan = Rng::stream(cfg.seed, Stream::channel);
    ArqQueue queue{cfg.n_users, {}, {}};
    std::uint64_t next_id = 1;
    std::int64_t backlog[1] = {0};

    for (std::int64_t t = 0; t < cfg.slots; ++t) {
        SlotTally tally;
        if (cfg.deadline) {
            const auto head = queue.packets.empty() ? 0 : queue.packets.front().id;
            tally.dropped = drop_expired(queue.packets, t, *cfg.deadline);
            if (queue.packets.empty() || queue.packets.front().id != head) queue.acked = UserSet{};
        }
        if (arrivals.bernoulli(cfg.lambda)) {
            std::optional<std::int64_t> due;
            if (cfg.deadline) due = t + *cfg.deadline;
            queue.packets.push_back(Packet{next_id++, t, due});
            ++m.arrived;
        }
        const auto eps = channel.eps_at(t);
        const ArqDecision d = decide_arq(queue);
        const ReceptionOutcome outcome = sample_outcome(eps, d.intended, chan);
        if (!d.idle()) {
            tally.schedule_id = 0;
            if (arq_feedback(queue, outcome)) tally.delivered = 1;
        }
        backlog[0] = queue.backlog();
        recorder.record(t, backlog, tally);
    }
    finalize(m);
    return m;
}

}  // namespace

Metrics run(const SimConfig& cfg, const SlotObserver& observer) {
    cfg.validate();
    ChannelModel channel = cfg.channel;
    channel.seed = cfg.seed;
    if (cfg.scheduler.kind == SchedulerKind::arq) return run_arq(cfg, channel, observer);

    Metrics m;
    m.slots = cfg.slots;
    m.backlog_trace.reserve(cfg.slots);
    m.lyapunov_trace.reserve(cfg.slots);
    Recorder recorder(m, observer);

    auto layout = std::make_shared<const SubQueueLayout>(cfg.n_users);
    const auto schedules = enumerate_schedules(cfg.n_users, cfg.schedule_cap);
    QueueSystem state(layout);

    Rng arrivals = Rng::stream(cfg.seed, Stream::arrivals);
    Rng chan = Rng::stream(cfg.seed, Stream::channel);
    Rng lps_rng = Rng::stream(cfg.seed, Stream::lps);

    const auto mean_eps = channel.mean_eps();
    std::vector<double> lps_p;
    const bool lps = cfg.scheduler.kind == SchedulerKind::lps;
    if (lps && cfg.scheduler.lps_refresh == LpsRefresh::static_mean) {
        const auto sol = solve_stability(cfg.n_users, mean_eps, cfg.lambda, cfg.schedule_cap);
        if (sol.status != LpStatus::optimal)
            throw std::runtime_error("stability LP is " + to_string(sol.status));
        lps_p = sol.p;
    }

    std::uint64_t next_id = 1;
    std::vector<std::int64_t> backlog(layout->size(), 0);

    for (std::int64_t t = 0; t < cfg.slots; ++t) {
        SlotTally tally;
        if (cfg.deadline)
            for (int i = 0; i < state.size(); ++i)
                tally.dropped += drop_expired(state.queue(i).packets, t, *cfg.deadline);

        if (arrivals.bernoulli(cfg.lambda)) {
            std::optional<std::int64_t> due;
            if (cfg.deadline) due = t + *cfg.deadline;
            state.push_arrival(Packet{next_id++, t, due});
            ++m.arrived;
        }

        const auto eps = channel.eps_at(t);
        const auto& seen = cfg.scheduler.eps_view == EpsView::current ? eps : mean_eps;

        Decision decision;
        switch (cfg.scheduler.kind) {
            case SchedulerKind::lys:
                decision = decide_lys(state, schedules, seen, cfg.lambda, cfg.scheduler);
                break;
            case SchedulerKind::lys_beta:
                decision = decide_lys_beta(state, schedules, seen, cfg.lambda, t, cfg.scheduler);
                break;
            case SchedulerKind::lps:
                if (cfg.scheduler.lps_refresh == LpsRefresh::per_slot) {
                    const auto sol = solve_stability(cfg.n_users, seen, cfg.lambda, cfg.schedule_cap);
                    if (sol.status != LpStatus::optimal)
                        throw std::runtime_error("stability LP is " + to_string(sol.status));
                    lps_p = sol.p;
                }
                decision = decide_lps(state, schedules, lps_p, lps_rng);
                break;
            case SchedulerKind::arq:
                break;
        }

        UserSet intended;
        std::span<const int> parts;
        if (!decision.idle()) {
            parts = schedules[*decision.schedule].parts;
            intended = contributing_users(state, parts);
        }
        const ReceptionOutcome outcome = sample_outcome(eps, intended, chan);
        if (!decision.idle()) {
            tally.schedule_id = *decision.schedule;
            for (const auto& ev : relocate_in_place(state, parts, outcome, cfg.move_insertion))
                if (ev.fate == Fate::leave) ++tally.delivered;
        }

        for (int i = 0; i < state.size(); ++i) backlog[i] = state.backlog(i);
        recorder.record(t, backlog, tally);
    }
    finalize(m);
    return m;
}

StabilityVerdict is_stable(std::span<const std::int64_t> trace, double warmup_fraction,
                           const StabilityCriteria& criteria) {
    if (trace.size() < criteria.min_length)
        throw std::invalid_argument("stability test needs at least " +
                                    std::to_string(criteria.min_length) + " slots, got " +
                                    std::to_string(trace.size()));
    const std::size_t start = static_cast<std::size_t>(warmup_fraction * trace.size());
    const std::size_t span_len = trace.size() - start;
    const std::size_t windows =
        std::max<std::size_t>(2, std::min<std::size_t>(criteria.windows, span_len));
    const std::size_t width = span_len / windows;

    std::vector<double> xs, ys;
    for (std::size_t w = 0; w < windows; ++w) {
        const std::size_t lo = start + w * width;
        double sum = 0.0;
        for (std::size_t k = lo; k < lo + width; ++k) sum += static_cast<double>(trace[k]);
        xs.push_back(static_cast<double>(lo) + 0.5 * static_cast<double>(width));
        ys.push_back(sum / static_cast<double>(width));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }

    StabilityVerdict v;
    v.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    v.final_level = ys.back();
    v.stable = v.slope < criteria.max_slope &&
               v.final_level < criteria.max_level_fraction * static_cast<double>(trace.size());
    return v;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < count; k = next++) {
                    try {
                        fn(k);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

double estimate_lambda_max(const SimConfig& base, const LambdaSearch& search) {
    if (search.tolerance < 0.01) throw std::invalid_argument("tolerance must be at least 0.01");
    if (search.seeds < 1) throw std::invalid_argument("at least one seed is required");

    auto stable_at = [&](double lambda) {
        std::vector<int> votes(search.seeds, 0);
        parallel_for(votes.size(), search.threads, [&](std::size_t k) {
            SimConfig cfg = base;
            cfg.lambda = lambda;
            cfg.seed = base.seed + k;
            const Metrics m = run(cfg);
            votes[k] = is_stable(m.backlog_trace, cfg.warmup_fraction, search.criteria).stable;
        });
        int yes = 0;
        for (int v : votes) yes += v;
        return 2 * yes > search.seeds;
    };

    double lo = 0.0, hi = 1.0;
    while (hi - lo > search.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (stable_at(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

SweepParameter parse_sweep_parameter(const std::string& s) {
    if (s == "lambda") return SweepParameter::lambda;
    if (s == "eps") return SweepParameter::eps;
    if (s == "deadline") return SweepParameter::deadline;
    if (s == "beta") return SweepParameter::beta;
    throw std::invalid_argument("unknown sweep parameter '" + s + "' (lambda|eps|deadline|beta)");
}

std::string to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::lambda: return "lambda";
        case SweepParameter::eps: return "eps";
        case SweepParameter::deadline: return "deadline";
        case SweepParameter::beta: return "beta";
    }
    return "?";
}

SimConfig with_parameter(const SimConfig& base, SweepParameter parameter, double value) {
    SimConfig cfg = base;
    switch (parameter) {
        case SweepParameter::lambda: cfg.lambda = value; break;
        case SweepParameter::eps:
            cfg.channel = ChannelModel::fixed(std::vector<double>(cfg.n_users, value));
            break;
        case SweepParameter::deadline:
            cfg.deadline = static_cast<std::int64_t>(std::llround(value));
            break;
        case SweepParameter::beta:
            cfg.scheduler.kind = SchedulerKind::lys_beta;
            cfg.scheduler.beta = value;
            break;
    }
    return cfg;
}

std::uint64_t sweep_seed(std::uint64_t base_seed, std::size_t point, int replicate, int replicates) {
    return base_seed + point * static_cast<std::uint64_t>(replicates) +
           static_cast<std::uint64_t>(replicate);
}

std::vector<SweepRow> sweep(const SimConfig& base, SweepParameter parameter,
                            std::span<const double> grid, int replicates, int threads) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");

    const std::size_t jobs = grid.size() * static_cast<std::size_t>(replicates);
    std::vector<Metrics> results(jobs);
    parallel_for(jobs, threads, [&](std::size_t job) {
        const std::size_t point = job / replicates;
        const int rep = static_cast<int>(job % replicates);
        SimConfig cfg = with_parameter(base, parameter, grid[point]);
        cfg.seed = sweep_seed(base.seed, point, rep, replicates);
        Metrics m = run(cfg);
        m.backlog_trace.clear();
        m.backlog_trace.shrink_to_fit();
        m.lyapunov_trace.clear();
        m.lyapunov_trace.shrink_to_fit();
        results[job] = std::move(m);
    });

    std::vector<SweepRow> rows(grid.size());
    for (std::size_t point = 0; point < grid.size(); ++point) {
        SweepRow& row = rows[point];
        row.value = grid[point];
        row.replicates = replicates;
        for (int rep = 0; rep < replicates; ++rep) {
            const Metrics& m = results[point * replicates + rep];
            row.avg_total_backlog += m.avg_total_backlog;
            row.throughput_pct += m.throughput_pct;
            row.throughput_per_slot += m.throughput_per_slot;
            row.drop_pct += m.drop_pct;
            row.arrived += static_cast<double>(m.arrived);
            row.delivered += static_cast<double>(m.delivered);
            row.dropped += static_cast<double>(m.dropped);
            row.idle_slots += static_cast<double>(m.idle_slots);
        }
        const double r = replicates;
        row.avg_total_backlog /= r;
        row.throughput_pct /= r;
        row.throughput_per_slot /= r;
        row.drop_pct /= r;
        row.arrived /= r;
        row.delivered /= r;
        row.dropped /= r;
        row.idle_slots /= r;
    }
    return rows;
}

}  // namespace ncsched

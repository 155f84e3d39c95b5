// Acceptance report. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "golden_lp.hpp"
#include "ncsched/engine.hpp"
#include "ncsched/lp.hpp"
#include "ncsched/rates.hpp"
#include "ncsched/schedule.hpp"
#include "ncsched/schedulers.hpp"

using namespace ncsched;

namespace {

using Clock = std::chrono::steady_clock;

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void report(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto start = Clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("criterion %d %s: %s (%.1fs)%s\n", id, o.pass ? "PASS" : "FAIL", title.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
}

// Every simulation run by this binary is checked for packet conservation.
std::mutex conservation_mutex;
long runs_checked = 0;
long conservation_violations = 0;

Metrics checked_run(const SimConfig& cfg, bool keep_trace = false) {
    Metrics m = run(cfg);
    if (!keep_trace) {
        m.backlog_trace.clear();
        m.lyapunov_trace.clear();
    }
    std::lock_guard lock(conservation_mutex);
    ++runs_checked;
    if (m.arrived != m.delivered + m.dropped + m.residual) ++conservation_violations;
    return m;
}

struct Averages {
    double backlog = 0, drop_pct = 0, throughput_pct = 0;
};

// Seed-averaged metrics of `cfg` with `param` set to each grid value.
std::vector<Averages> seed_averaged(const SimConfig& base, SweepParameter param,
                                    const std::vector<double>& grid, int seeds) {
    std::vector<Metrics> out(grid.size() * seeds);
    parallel_for(out.size(), threads(), [&](std::size_t idx) {
        const std::size_t k = idx / seeds;
        const int r = static_cast<int>(idx % seeds);
        SimConfig cfg = with_parameter(base, param, grid[k]);
        cfg.seed = sweep_seed(base.seed, k, r, seeds);
        out[idx] = checked_run(cfg);
    });
    std::vector<Averages> avg(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (int r = 0; r < seeds; ++r) {
            const auto& m = out[k * seeds + r];
            avg[k].backlog += m.avg_total_backlog / seeds;
            avg[k].drop_pct += m.drop_pct / seeds;
            avg[k].throughput_pct += m.throughput_pct / seeds;
        }
    }
    return avg;
}

SimConfig symmetric(double eps, double lambda, SchedulerKind kind) {
    SimConfig cfg;
    cfg.channel = ChannelModel::fixed({eps, eps, eps});
    cfg.lambda = lambda;
    cfg.scheduler.kind = kind;
    return cfg;
}

std::string fmt(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

void criterion1(Outcome& o) {
    const std::vector<std::vector<int>> table{
        {1, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 1, 1}, {0, 1, 0, 0, 0, 0, 1},
        {0, 0, 1, 0, 1, 0, 0}, {0, 0, 0, 1, 0, 1, 0},
    };
    const auto start = Clock::now();
    o.require(incidence_matrix(enumerate_schedules(3), 7) == table, "N=3 incidence grid");
    const std::size_t bell[] = {1, 2, 5, 15, 52, 203, 877, 4140};
    for (int n = 1; n <= 8; ++n)
        o.require(enumerate_schedules(n).size() == bell[n - 1], "Bell count N=" + std::to_string(n));
    o.require(enumerate_schedules(8) == enumerate_schedules(8), "deterministic");
    o.require(Clock::now() - start < std::chrono::seconds(1), "under 1 s");
}

double max_rate_gap(const SubQueueLayout& layout, const Schedule& s, const std::vector<bool>& occ,
                    const std::vector<double>& eps, double lambda) {
    const auto a = expected_rates(layout, s, occ, eps, lambda);
    const auto b = brute_force_rates(layout, s, occ, eps, lambda);
    double gap = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i)
        gap = std::max({gap, std::abs(a.a[i] - b.a[i]), std::abs(a.d[i] - b.d[i])});
    return gap;
}

void criterion2(Outcome& o) {
    double worst = 0.0;
    long cases = 0;
    const double grid[] = {0.1, 0.3, 0.5};
    for (int n = 2; n <= 3; ++n) {
        const SubQueueLayout layout(n);
        const int m = layout.size();
        const auto schedules = enumerate_schedules(n);
        const int combos = n == 2 ? 9 : 27;
        for (int c = 0; c < combos; ++c) {
            std::vector<double> eps(n);
            for (int u = 0, rest = c; u < n; ++u, rest /= 3) eps[u] = grid[rest % 3];
            for (const auto& s : schedules)
                for (std::uint32_t occ = 0; occ < (1u << m); ++occ) {
                    std::vector<bool> occupied(m);
                    for (int i = 0; i < m; ++i) occupied[i] = (occ >> i) & 1u;
                    worst = std::max(worst, max_rate_gap(layout, s, occupied, eps, 0.5));
                    ++cases;
                }
        }
    }
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 0.95);
    for (int t = 0; t < 1000; ++t) {
        const int n = 4 + t % 3;
        const SubQueueLayout layout(n);
        const auto schedules = enumerate_schedules(n);
        const auto& s = schedules[rng() % schedules.size()];
        std::vector<double> eps(n);
        for (auto& e : eps) e = unit(rng);
        std::vector<bool> occupied(layout.size());
        for (int i = 0; i < layout.size(); ++i) occupied[i] = rng() % 2;
        worst = std::max(worst, max_rate_gap(layout, s, occupied, eps, unit(rng)));
        ++cases;
    }
    o.detail << " cases=" << cases << " max_gap=" << worst;
    o.require(worst <= 1e-10, "componentwise gap <= 1e-10");
}

void criterion3(Outcome& o) {
    const std::vector<std::vector<double>> cases{{0.1, 0.4, 0.3}, {0.2, 0.2, 0.2}, {0.05, 0.5, 0.85}};
    double worst = 0.0;
    for (const auto& eps : cases) {
        const auto lp = build_stability_lp(3, eps, 0.7);
        const auto want = golden::three_user_rows(eps);
        o.require(lp.constraints.size() == 8, "7 inequalities + 1 equality");
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 5; ++j)
                worst = std::max(worst, std::abs(lp.constraints[i].coeffs[j] - want[i][j]));
            worst = std::max(worst, std::abs(lp.constraints[i].coeffs[5] - 1.0));
            worst = std::max(worst, std::abs(lp.constraints[i].rhs - (i == 0 ? -0.7 : 0.0)));
        }
    }
    o.detail << " coeff_gap=" << worst;
    o.require(worst <= 1e-12, "coefficients within 1e-12");

    // Grid search with step 0.02 over the 5-simplex.
    for (const auto& eps : cases) {
        const double lambda = 0.5;
        const auto rows = golden::three_user_rows(eps);
        auto margin = [&](const double* p) {
            double best = 1e300;
            for (int i = 0; i < 7; ++i) {
                double lhs = 0.0;
                for (int j = 0; j < 5; ++j) lhs += rows[i][j] * p[j];
                best = std::min(best, (i == 0 ? -lambda : 0.0) - lhs);
            }
            return best;
        };
        double grid_best = -1e300;
        const int steps = 50;
        double p[5];
        for (int a = 0; a <= steps; ++a)
            for (int b = 0; a + b <= steps; ++b)
                for (int c = 0; a + b + c <= steps; ++c)
                    for (int d = 0; a + b + c + d <= steps; ++d) {
                        p[0] = a * 0.02, p[1] = b * 0.02, p[2] = c * 0.02, p[3] = d * 0.02;
                        p[4] = (steps - a - b - c - d) * 0.02;
                        grid_best = std::max(grid_best, margin(p));
                    }
        const auto sol = solve_stability(3, eps, lambda);
        o.detail << " lp=" << fmt(sol.delta_max) << "/grid=" << fmt(grid_best);
        o.require(sol.status == LpStatus::optimal, "optimal");
        // Moving p to the nearest grid point changes it by at most 0.04 in l1
        // and every coefficient lies in [-1, 1].
        o.require(grid_best <= sol.delta_max + 1e-9 && sol.delta_max - grid_best <= 0.04,
                  "simplex within grid resolution");
    }
}

void criterion4(Outcome& o) {
    LambdaSearch search;
    search.tolerance = 0.01;
    search.seeds = 3;
    search.threads = threads();
    double lys_at_02 = 0.0;
    for (double eps : {0.1, 0.2, 0.3, 0.4}) {
        for (auto kind : {SchedulerKind::lys, SchedulerKind::lps}) {
            SimConfig cfg = symmetric(eps, 0.0, kind);
            cfg.slots = 100000;
            const double lm = estimate_lambda_max(cfg, search);
            if (kind == SchedulerKind::lys && eps == 0.2) lys_at_02 = lm;
            o.detail << " " << to_string(kind) << "@" << eps << "=" << fmt(lm);
            o.require(std::abs(lm - (1 - eps)) <= 0.05, to_string(kind) + " at eps " + fmt(eps, 1));
        }
    }
    SimConfig arq = symmetric(0.2, 0.0, SchedulerKind::arq);
    arq.slots = 100000;
    const double lm = estimate_lambda_max(arq, search);
    const double oracle = 1.0 / (3 / 0.8 - 3 / 0.96 + 1 / 0.992);
    o.detail << " arq@0.2=" << fmt(lm) << " (1/E[max of 3 geometrics]=" << fmt(oracle) << ")";
    o.require(std::abs(lm - 0.693) <= 0.05, "ARQ within 0.693 +- 0.05");
    o.require(lm < lys_at_02, "ARQ below LyS");
    // Not a criterion of its own: where ARQ sits relative to its closed form.
    std::printf("  note: ARQ lambda_max %s vs closed form %s -> %s within 0.05\n", fmt(lm).c_str(),
                fmt(oracle).c_str(), std::abs(lm - oracle) <= 0.05 ? "agrees" : "DISAGREES");
}

void criterion5(Outcome& o) {
    SimConfig base;
    base.channel = ChannelModel::fading({{0, 0.4}, {0, 0.4}, {0, 0.4}});
    base.lambda = 0.7;
    base.slots = 200000;
    const std::vector<double> single{0.7};
    base.scheduler.kind = SchedulerKind::lys;
    const double lys = seed_averaged(base, SweepParameter::lambda, single, 5)[0].backlog;
    base.scheduler.kind = SchedulerKind::lps;
    const double lps = seed_averaged(base, SweepParameter::lambda, single, 5)[0].backlog;
    o.detail << " Q(LyS)=" << fmt(lys, 2) << " Q(LPS)=" << fmt(lps, 2) << " ratio=" << fmt(lps / lys, 2);
    o.require(lys < 10, "Q(LyS) < 10");
    o.require(lps > 20, "Q(LPS) > 20");
    o.require(lps / lys > 3, "ratio > 3");
}

void criterion6(Outcome& o) {
    for (double lambda : {0.7, 0.85}) {
        std::vector<int> stable(5);
        parallel_for(5, threads(), [&](std::size_t r) {
            SimConfig cfg = symmetric(0.2, lambda, SchedulerKind::lys);
            cfg.seed = r;
            const Metrics m = checked_run(cfg, true);
            stable[r] = is_stable(m.backlog_trace, cfg.warmup_fraction).stable;
        });
        int votes = 0;
        for (int s : stable) votes += s;
        o.detail << " lambda=" << lambda << " stable_votes=" << votes << "/5";
        if (lambda == 0.7)
            o.require(votes >= 3, "0.7 stable");
        else
            o.require(votes <= 2, "0.85 unstable");
    }
}

void criterion7(Outcome& o) {
    const std::vector<double> grid{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    SimConfig base = symmetric(0.2, 0.7, SchedulerKind::lys_beta);
    std::vector<std::vector<Averages>> curves;
    for (double beta : {0.0, 0.5}) {
        base.scheduler.beta = beta;
        curves.push_back(seed_averaged(base, SweepParameter::deadline, grid, 5));
        const auto& c = curves.back();
        bool drop_monotone = true, throughput_monotone = true;
        for (std::size_t k = 1; k < grid.size(); ++k) {
            drop_monotone &= c[k].drop_pct <= c[k - 1].drop_pct;
            throughput_monotone &= c[k].throughput_pct >= c[k - 1].throughput_pct;
        }
        o.detail << " beta=" << beta << " drop%=" << fmt(c.front().drop_pct, 2) << ".."
                 << fmt(c.back().drop_pct, 2);
        o.require(drop_monotone, "drop non-increasing, beta " + fmt(beta, 1));
        o.require(throughput_monotone, "throughput non-decreasing, beta " + fmt(beta, 1));
    }
    int violations = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) violations += curves[1][k].drop_pct > curves[0][k].drop_pct;
    o.detail << " beta-worse points=" << violations;
    o.require(violations <= 1, "drop(beta=0.5) <= drop(beta=0) at all but one point");
}

void criterion8(Outcome& o) {
    const std::vector<double> grid{0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75};
    SimConfig base = symmetric(0.2, 0.0, SchedulerKind::lys_beta);
    base.deadline = 10;
    base.scheduler.beta = 0.0;
    const auto plain = seed_averaged(base, SweepParameter::lambda, grid, 5);
    base.scheduler.beta = 0.5;
    const auto aged = seed_averaged(base, SweepParameter::lambda, grid, 5);
    int below = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) below += aged[k].backlog < plain[k].backlog;
    o.detail << " Q(0.5)-Q(0) at 0.3=" << fmt(aged.front().backlog - plain.front().backlog)
             << " at 0.75=" << fmt(aged.back().backlog - plain.back().backlog) << " points_below=" << below;
    o.require(below == 0, "Q(beta=0.5) >= Q(beta=0) on the whole grid");
}

void criterion9(Outcome& o) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 0.99);

    double worst_sum = 0.0;
    for (int n = 1; n <= 6; ++n) {
        const SubQueueLayout layout(n);
        for (int t = 0; t < 50; ++t) {
            std::vector<double> eps(n);
            for (auto& e : eps) e = unit(rng);
            for (int i = 0; i < layout.size(); ++i) {
                double total = 0.0;
                for (const auto& e : transition_distribution(layout.index_set(i), eps).entries())
                    total += e.probability;
                worst_sum = std::max(worst_sum, std::abs(total - 1.0));
            }
        }
    }
    o.detail << " dist_sum_gap=" << worst_sum;
    o.require(worst_sum <= 1e-12, "transition distributions sum to 1");

    // Determinism: identical trace hashes for the same seed.
    auto hash = [](const SimConfig& cfg) {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::int64_t v) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        };
        run(cfg, [&](const SlotRecord& r) {
            for (auto q : r.backlog) mix(q);
            mix(r.schedule_id);
            mix(r.delivered);
            mix(r.dropped);
        });
        return h;
    };
    bool deterministic = true;
    for (auto kind : {SchedulerKind::arq, SchedulerKind::lps, SchedulerKind::lys, SchedulerKind::lys_beta}) {
        SimConfig cfg = symmetric(0.2, 0.7, kind);
        cfg.channel = ChannelModel::fading({{0, 0.4}, {0, 0.4}, {0, 0.4}});
        cfg.slots = 20000;
        cfg.deadline = 8;
        cfg.scheduler.beta = kind == SchedulerKind::lys_beta ? 0.5 : 0.0;
        deterministic &= hash(cfg) == hash(cfg);
    }
    o.require(deterministic, "same seed, same trace hash");

    const auto schedules = enumerate_schedules(3);
    auto random_state = [&](bool ages) {
        QueueSystem q(3);
        std::uint64_t id = 1;
        for (int i = 0; i < 7; ++i) {
            const int k = static_cast<int>(rng() % 5) * static_cast<int>(rng() % 2);
            for (int p = 0; p < k; ++p)
                q.queue(i).packets.push_back({id++, ages ? static_cast<std::int64_t>(rng() % 40) : 0, {}});
        }
        return q;
    };
    int beta_mismatch = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto q = random_state(true);
        const std::vector<double> eps{unit(rng), unit(rng), unit(rng)};
        const double lambda = unit(rng);
        SchedulerConfig cfg;
        cfg.dv_mode = t % 2 ? DvMode::full : DvMode::reduced;
        const auto a = decide_lys(q, schedules, eps, lambda, cfg);
        cfg.kind = SchedulerKind::lys_beta;
        const auto b = decide_lys_beta(q, schedules, eps, lambda, 50, cfg);
        beta_mismatch += a.schedule != b.schedule;
    }
    o.detail << " beta0_mismatch=" << beta_mismatch;
    o.require(beta_mismatch == 0, "LyS-beta with beta=0 equals LyS");

    int scale_mismatch = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto q = random_state(false);
        QueueSystem scaled(3);
        const int factor = 1 << (1 + rng() % 4);
        for (int i = 0; i < 7; ++i)
            for (int f = 0; f < factor; ++f)
                for (const auto& p : q.queue(i).packets) scaled.queue(i).packets.push_back(p);
        const std::vector<double> eps{unit(rng), unit(rng), unit(rng)};
        const double lambda = unit(rng);
        SchedulerConfig cfg;
        cfg.dv_mode = t % 2 ? DvMode::full : DvMode::reduced;
        scale_mismatch += decide_lys(q, schedules, eps, lambda, cfg).schedule !=
                          decide_lys(scaled, schedules, eps, lambda, cfg).schedule;
    }
    o.detail << " scale_mismatch=" << scale_mismatch;
    o.require(scale_mismatch == 0, "argmin invariant under scaling");

    o.detail << " runs_checked=" << runs_checked << " conservation_violations=" << conservation_violations;
    o.require(runs_checked > 0 && conservation_violations == 0, "packet conservation on every run");
}

}  // namespace

int main() {
    report(1, "schedule enumeration", criterion1);
    report(2, "rate oracle equivalence", criterion2);
    report(3, "stability LP golden rows and grid search", criterion3);
    report(4, "capacity region", criterion4);
    report(5, "fading backlog LyS vs LPS", criterion5);
    report(6, "stability dichotomy", criterion6);
    report(7, "deadline trends", criterion7);
    report(8, "beta backlog cost", criterion8);
    report(9, "property suites", criterion9);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

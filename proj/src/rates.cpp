#include "ncsched/rates.hpp"

#include <algorithm>
#include <stdexcept>

namespace ncsched {

TransitionDistribution::TransitionDistribution(UserSet intended, std::span<const double> eps)
    : intended_(intended) {
    if (intended.empty()) throw std::invalid_argument("transition_distribution: empty index set");
    const std::uint32_t full = intended.mask();
    // Enumerate submasks of `full` in ascending order.
    std::uint32_t sub = 0;
    while (true) {
        double p = 1.0;
        for (int u : intended.members()) {
            const double e = eps[u - 1];
            p *= ((sub >> (u - 1)) & 1u) ? e : 1.0 - e;
        }
        entries_.push_back({UserSet(sub), p});
        if (sub == full) break;
        sub = (sub - full) & full;
    }
}

double TransitionDistribution::probability(UserSet failed) const {
    for (const auto& e : entries_)
        if (e.failed == failed) return e.probability;
    return 0.0;
}

TransitionDistribution transition_distribution(UserSet intended, std::span<const double> eps) {
    return TransitionDistribution(intended, eps);
}

double success_probability(UserSet intended, std::span<const double> eps) {
    double stay = 1.0;
    for (int u : intended.members()) stay *= eps[u - 1];
    return 1.0 - stay;
}

RateVector expected_rates(const SubQueueLayout& layout, const Schedule& schedule,
                          const std::vector<bool>& occupied, std::span<const double> eps,
                          double lambda) {
    const int m = layout.size();
    RateVector r{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    for (int i : schedule.parts) {
        if (!occupied[i]) continue;
        const UserSet set = layout.index_set(i);
        const TransitionDistribution dist(set, eps);
        r.d[i] = 1.0 - dist.stay();
        for (const auto& e : dist.entries())
            if (!e.failed.empty() && e.failed != set) r.a[layout.index_of(e.failed)] += e.probability;
    }
    r.a[0] += lambda;
    return r;
}

RateVector brute_force_rates(const SubQueueLayout& layout, const Schedule& schedule,
                             const std::vector<bool>& occupied, std::span<const double> eps,
                             double lambda) {
    const int n = layout.n_users();
    const int m = layout.size();
    if (n > 8) throw std::invalid_argument("brute_force_rates supports N <= 8");

    auto shared = std::make_shared<const SubQueueLayout>(layout);
    QueueSystem base(shared);
    std::uint64_t next_id = 1;
    for (int i : schedule.parts)
        if (occupied[i]) base.queue(i).packets.push_back(Packet{next_id++, 0, std::nullopt});

    RateVector r{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    for (std::uint32_t received = 0; received < (1u << n); ++received) {
        double p = 1.0;
        for (int u = 0; u < n; ++u) p *= ((received >> u) & 1u) ? 1.0 - eps[u] : eps[u];
        if (p == 0.0) continue;
        const auto result = relocate(base, schedule.parts, ReceptionOutcome{UserSet(received)});
        for (const auto& ev : result.events) {
            if (ev.fate == Fate::stay) continue;
            r.d[ev.from] += p;
            if (ev.fate == Fate::move) r.a[ev.to] += p;
        }
    }
    r.a[0] += lambda;
    return r;
}

}  // namespace ncsched

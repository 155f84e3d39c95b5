#include "ncsched/channel.hpp"

#include <stdexcept>
#include <string>

namespace ncsched {

ChannelModel ChannelModel::fixed(std::vector<double> eps, std::uint64_t seed) {
    ChannelModel ch;
    ch.mode = ChannelMode::fixed;
    ch.eps_fixed = std::move(eps);
    ch.seed = seed;
    return ch;
}

ChannelModel ChannelModel::fading(std::vector<std::pair<double, double>> range, std::uint64_t seed) {
    ChannelModel ch;
    ch.mode = ChannelMode::uniform_fading;
    ch.eps_range = std::move(range);
    ch.seed = seed;
    return ch;
}

int ChannelModel::n_users() const {
    return static_cast<int>(mode == ChannelMode::fixed ? eps_fixed.size() : eps_range.size());
}

void ChannelModel::validate() const {
    auto in_range = [](double e) { return e >= 0.0 && e < 1.0; };
    if (mode == ChannelMode::fixed) {
        for (std::size_t u = 0; u < eps_fixed.size(); ++u)
            if (!in_range(eps_fixed[u]))
                throw std::invalid_argument("eps[" + std::to_string(u) + "] must lie in [0, 1)");
    } else {
        for (std::size_t u = 0; u < eps_range.size(); ++u) {
            const auto [lo, hi] = eps_range[u];
            if (!in_range(lo) || !in_range(hi) || lo > hi)
                throw std::invalid_argument("eps_range[" + std::to_string(u) +
                                            "] must satisfy 0 <= lo <= hi < 1");
        }
    }
}

std::vector<double> ChannelModel::eps_at(std::int64_t slot) const {
    if (mode == ChannelMode::fixed) return eps_fixed;
    std::vector<double> eps(eps_range.size());
    const std::uint64_t base =
        splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(Stream::fading)));
    for (std::size_t u = 0; u < eps_range.size(); ++u) {
        const auto [lo, hi] = eps_range[u];
        const std::uint64_t key =
            base ^ splitmix64(static_cast<std::uint64_t>(slot) * eps_range.size() + u);
        eps[u] = lo + (hi - lo) * to_unit(splitmix64(key));
    }
    return eps;
}

std::vector<double> ChannelModel::mean_eps() const {
    if (mode == ChannelMode::fixed) return eps_fixed;
    std::vector<double> eps(eps_range.size());
    for (std::size_t u = 0; u < eps_range.size(); ++u)
        eps[u] = 0.5 * (eps_range[u].first + eps_range[u].second);
    return eps;
}

ReceptionOutcome sample_outcome(std::span<const double> eps, UserSet intended, Rng& rng) {
    ReceptionOutcome out;
    for (std::size_t u = 0; u < eps.size(); ++u) {
        const bool ok = rng.uniform() >= eps[u];
        const int user = static_cast<int>(u) + 1;
        if (ok && intended.contains(user)) out.received = out.received | UserSet::of({user});
    }
    return out;
}

}  // namespace ncsched

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ncsched/core_model.hpp"
#include "ncsched/rng.hpp"

namespace ncsched {

enum class ChannelMode { fixed, uniform_fading };

/// Independent per-user erasure channels. In fading mode each user's erasure
/// probability is redrawn every slot, uniformly on its [lo, hi] interval.
struct ChannelModel {
    ChannelMode mode = ChannelMode::fixed;
    std::vector<double> eps_fixed;
    std::vector<std::pair<double, double>> eps_range;
    std::uint64_t seed = 0;

    static ChannelModel fixed(std::vector<double> eps, std::uint64_t seed = 0);
    static ChannelModel fading(std::vector<std::pair<double, double>> range, std::uint64_t seed = 0);

    int n_users() const;
    /// Throws std::invalid_argument when any probability leaves [0, 1).
    void validate() const;

    /// Erasure probabilities in force during `slot`. Pure in (seed, slot).
    std::vector<double> eps_at(std::int64_t slot) const;
    /// Long-run mean erasure probability per user.
    std::vector<double> mean_eps() const;

    bool operator==(const ChannelModel&) const = default;
};

/// Draws one uniform per user (so the stream advances identically whatever
/// was sent) and reports the intended users whose draw was not an erasure.
ReceptionOutcome sample_outcome(std::span<const double> eps, UserSet intended, Rng& rng);

}  // namespace ncsched

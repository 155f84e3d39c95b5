#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ncsched/core_model.hpp"
#include "ncsched/schedule.hpp"

namespace ncsched {

/// Where a head-of-line packet with index set I goes after one transmission:
/// the set F of intended users that failed. F empty means it leaves the
/// system, F == I means it stays put.
class TransitionDistribution {
public:
    struct Entry {
        UserSet failed;
        double probability;
    };

    TransitionDistribution(UserSet intended, std::span<const double> eps);

    UserSet intended() const { return intended_; }
    const std::vector<Entry>& entries() const& { return entries_; }
    // By value on temporaries, so range-for over a fresh distribution is safe.
    std::vector<Entry> entries() && { return std::move(entries_); }

    double probability(UserSet failed) const;
    double leave() const { return probability(UserSet{}); }
    double stay() const { return probability(intended_); }

private:
    UserSet intended_;
    std::vector<Entry> entries_;  // every subset of intended, ascending mask
};

TransitionDistribution transition_distribution(UserSet intended, std::span<const double> eps);

/// Expected per-slot arrivals (a) and departures (d) for every sub-queue,
/// conditional on the schedule and on which sub-queues hold a packet.
struct RateVector {
    std::vector<double> a;
    std::vector<double> d;
};

/// Closed form: d_i = 1 - prod_{u in I_i} eps_u for occupied parts, a_k sums
/// the probability of landing in I_k over occupied parts, plus lambda on q_0.
RateVector expected_rates(const SubQueueLayout& layout, const Schedule& schedule,
                          const std::vector<bool>& occupied, std::span<const double> eps,
                          double lambda);

/// Reference computation of expected_rates: enumerates all 2^N feedback
/// outcomes, pushes a synthetic state through relocate and averages.
RateVector brute_force_rates(const SubQueueLayout& layout, const Schedule& schedule,
                             const std::vector<bool>& occupied, std::span<const double> eps,
                             double lambda);

/// Probability that a packet for `intended` is received by every user.
double success_probability(UserSet intended, std::span<const double> eps);

}  // namespace ncsched

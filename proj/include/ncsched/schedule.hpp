#pragma once

#include <vector>

#include "ncsched/core_model.hpp"

namespace ncsched {

/// Default cap on N for schedule enumeration. Bell(8) = 4140 schedules are
/// evaluated every slot by the Lyapunov scheduler; each step up multiplies
/// that cost by roughly five.
inline constexpr int kDefaultScheduleCap = 8;

/// A network-coding schedule: sub-queues whose index sets partition {1..N}.
struct Schedule {
    int id = 0;
    std::vector<int> parts;  // sorted sub-queue indices

    bool operator==(const Schedule&) const = default;
};

/// All set partitions of the user set, as schedules. {q_0} comes first, then
/// schedules with more parts before fewer, then lexicographic part lists;
/// for N = 3 this is the S_0..S_4 order of the classic three-receiver table.
std::vector<Schedule> enumerate_schedules(int n_users, int cap = kDefaultScheduleCap);

/// Row j, column i is 1 iff sub-queue i participates in schedule j.
std::vector<std::vector<int>> incidence_matrix(const std::vector<Schedule>& schedules, int m);

}  // namespace ncsched

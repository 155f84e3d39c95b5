#include "ncsched/schedule.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ncsched {

namespace {

// Walks restricted growth strings: block[u] <= 1 + max(block[0..u-1]).
void partitions(int n, int user, int blocks, std::vector<int>& block_of,
                std::vector<std::vector<std::uint32_t>>& out) {
    if (user == n) {
        std::vector<std::uint32_t> masks(blocks, 0);
        for (int u = 0; u < n; ++u) masks[block_of[u]] |= 1u << u;
        out.push_back(std::move(masks));
        return;
    }
    for (int b = 0; b <= blocks; ++b) {
        block_of[user] = b;
        partitions(n, user + 1, std::max(blocks, b + 1), block_of, out);
    }
}

}  // namespace

std::vector<Schedule> enumerate_schedules(int n_users, int cap) {
    if (n_users < 1) throw std::invalid_argument("n_users must be at least 1");
    if (n_users > cap)
        throw std::invalid_argument(
            "n_users = " + std::to_string(n_users) + " exceeds the schedule cap of " +
            std::to_string(cap) +
            "; the schedule count grows as the Bell number and every schedule is scored each slot");

    const SubQueueLayout layout(n_users);
    std::vector<std::vector<std::uint32_t>> raw;
    std::vector<int> block_of(n_users, 0);
    partitions(n_users, 0, 0, block_of, raw);

    std::vector<Schedule> schedules;
    schedules.reserve(raw.size());
    for (const auto& masks : raw) {
        Schedule s;
        for (auto m : masks) s.parts.push_back(layout.index_of(UserSet(m)));
        std::sort(s.parts.begin(), s.parts.end());
        schedules.push_back(std::move(s));
    }
    std::sort(schedules.begin(), schedules.end(), [](const Schedule& a, const Schedule& b) {
        const bool a_full = a.parts.size() == 1, b_full = b.parts.size() == 1;
        if (a_full != b_full) return a_full;
        if (a.parts.size() != b.parts.size()) return a.parts.size() > b.parts.size();
        return a.parts < b.parts;
    });
    for (int j = 0; j < static_cast<int>(schedules.size()); ++j) schedules[j].id = j;
    return schedules;
}

std::vector<std::vector<int>> incidence_matrix(const std::vector<Schedule>& schedules, int m) {
    std::vector<std::vector<int>> grid(schedules.size(), std::vector<int>(m, 0));
    for (std::size_t j = 0; j < schedules.size(); ++j)
        for (int i : schedules[j].parts) grid[j].at(i) = 1;
    return grid;
}

}  // namespace ncsched

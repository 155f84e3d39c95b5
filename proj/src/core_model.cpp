#include "ncsched/core_model.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace ncsched {

namespace {

std::uint32_t gray_rank(std::uint32_t gray) {
    std::uint32_t rank = gray;
    for (std::uint32_t shift = gray >> 1; shift != 0; shift >>= 1) rank ^= shift;
    return rank;
}

void check_user_count(int n_users) {
    if (n_users < 1 || n_users > kMaxUsers)
        throw std::invalid_argument("n_users must be in [1, " + std::to_string(kMaxUsers) +
                                    "], got " + std::to_string(n_users));
}

}  // namespace

UserSet UserSet::full(int n_users) {
    check_user_count(n_users);
    return UserSet((1u << n_users) - 1u);
}

UserSet UserSet::of(std::initializer_list<int> users) {
    std::uint32_t mask = 0;
    for (int u : users) {
        if (u < 1 || u > kMaxUsers) throw std::invalid_argument("user out of range");
        mask |= 1u << (u - 1);
    }
    return UserSet(mask);
}

int UserSet::size() const { return std::popcount(mask_); }

bool UserSet::contains(int user) const {
    return user >= 1 && user <= 32 && (mask_ >> (user - 1) & 1u) != 0;
}

std::vector<int> UserSet::members() const {
    std::vector<int> out;
    for (int u = 1; u <= 32; ++u)
        if (contains(u)) out.push_back(u);
    return out;
}

std::string UserSet::to_string() const {
    std::string s = "{";
    bool first = true;
    for (int u : members()) {
        if (!first) s += ',';
        s += std::to_string(u);
        first = false;
    }
    return s + "}";
}

SubQueueLayout::SubQueueLayout(int n_users) : n_users_(n_users) {
    check_user_count(n_users);
    const std::uint32_t full = (1u << n_users) - 1u;
    std::vector<std::uint32_t> masks;
    masks.reserve(full);
    for (std::uint32_t m = 1; m < full; ++m) masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
        const int ca = std::popcount(a), cb = std::popcount(b);
        if (ca != cb) return ca > cb;
        return gray_rank(a) < gray_rank(b);
    });
    sets_.reserve(full);
    sets_.emplace_back(full);
    for (auto m : masks) sets_.emplace_back(m);

    index_by_mask_.assign(full + 1, -1);
    for (int i = 0; i < static_cast<int>(sets_.size()); ++i) index_by_mask_[sets_[i].mask()] = i;
}

UserSet SubQueueLayout::index_set(int index) const {
    if (index < 0 || index >= size())
        throw std::out_of_range("sub-queue index " + std::to_string(index) + " outside [0, " +
                                std::to_string(size() - 1) + "]");
    return sets_[index];
}

int SubQueueLayout::index_of(UserSet set) const {
    if (set.empty() || set.mask() >= index_by_mask_.size())
        throw std::invalid_argument("no sub-queue for index set " + set.to_string());
    return index_by_mask_[set.mask()];
}

UserSet index_set_of(int n_users, int index) { return SubQueueLayout(n_users).index_set(index); }

QueueSystem::QueueSystem(int n_users)
    : QueueSystem(std::make_shared<const SubQueueLayout>(n_users)) {}

QueueSystem::QueueSystem(std::shared_ptr<const SubQueueLayout> layout) : layout_(std::move(layout)) {
    queues_.resize(layout_->size());
    for (int i = 0; i < layout_->size(); ++i) {
        queues_[i].index = i;
        queues_[i].index_set = layout_->index_set(i);
    }
}

std::vector<std::int64_t> QueueSystem::backlog_vector() const {
    std::vector<std::int64_t> q(queues_.size());
    for (std::size_t i = 0; i < queues_.size(); ++i)
        q[i] = static_cast<std::int64_t>(queues_[i].packets.size());
    return q;
}

std::vector<bool> QueueSystem::occupancy() const {
    std::vector<bool> occ(queues_.size());
    for (std::size_t i = 0; i < queues_.size(); ++i) occ[i] = !queues_[i].packets.empty();
    return occ;
}

std::int64_t total_backlog(const QueueSystem& q) {
    std::int64_t total = 0;
    for (int i = 0; i < q.size(); ++i) total += q.backlog(i);
    return total;
}

UserSet contributing_users(const QueueSystem& q, std::span<const int> participating) {
    UserSet users;
    for (int i : participating)
        if (!q.queue(i).packets.empty()) users = users | q.queue(i).index_set;
    return users;
}

std::vector<RelocationEvent> relocate_in_place(QueueSystem& q, std::span<const int> participating,
                                               ReceptionOutcome outcome, MoveInsertion insertion) {
    UserSet seen;
    for (int i : participating) {
        const UserSet set = q.layout().index_set(i);
        if (!seen.disjoint(set))
            throw std::invalid_argument("participating sub-queues have overlapping index sets");
        seen = seen | set;
    }

    std::vector<RelocationEvent> events;
    events.reserve(participating.size());
    for (int i : participating) {
        auto& source = q.queue(i);
        if (source.packets.empty()) continue;
        const UserSet failed = source.index_set.minus(outcome.received);
        const Packet head = source.packets.front();
        if (failed.empty()) {
            source.packets.pop_front();
            events.push_back({head.id, i, Fate::leave, -1});
        } else if (failed == source.index_set) {
            events.push_back({head.id, i, Fate::stay, -1});
        } else {
            const int dest = q.layout().index_of(failed);
            source.packets.pop_front();
            auto& target = q.queue(dest).packets;
            if (insertion == MoveInsertion::tail)
                target.push_back(head);
            else
                target.push_front(head);
            events.push_back({head.id, i, Fate::move, dest});
        }
    }
    return events;
}

RelocationResult relocate(const QueueSystem& q, std::span<const int> participating,
                          ReceptionOutcome outcome, MoveInsertion insertion) {
    RelocationResult result{q, {}};
    result.events = relocate_in_place(result.state, participating, outcome, insertion);
    return result;
}

void apply_events(QueueSystem& q, std::span<const RelocationEvent> events, MoveInsertion insertion) {
    for (const auto& ev : events) {
        if (ev.fate == Fate::stay) continue;
        auto& source = q.queue(ev.from).packets;
        if (source.empty() || source.front().id != ev.packet_id)
            throw std::logic_error("event log does not match queue state");
        const Packet head = source.front();
        source.pop_front();
        if (ev.fate == Fate::move) {
            auto& target = q.queue(ev.to).packets;
            if (insertion == MoveInsertion::tail)
                target.push_back(head);
            else
                target.push_front(head);
        }
    }
}

}  // namespace ncsched

#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ncsched {

/// Hard cap on the number of receivers a UserSet can describe.
inline constexpr int kMaxUsers = 16;

/// A subset of the receivers {1, ..., N}. User u is stored in bit (u - 1).
class UserSet {
public:
    constexpr UserSet() = default;
    constexpr explicit UserSet(std::uint32_t mask) : mask_(mask) {}

    static UserSet full(int n_users);
    static UserSet of(std::initializer_list<int> users);

    constexpr std::uint32_t mask() const { return mask_; }
    constexpr bool empty() const { return mask_ == 0; }
    int size() const;
    bool contains(int user) const;
    std::vector<int> members() const;

    constexpr bool disjoint(UserSet other) const { return (mask_ & other.mask_) == 0; }
    constexpr bool subset_of(UserSet other) const { return (mask_ & ~other.mask_) == 0; }

    constexpr UserSet operator|(UserSet o) const { return UserSet(mask_ | o.mask_); }
    constexpr UserSet operator&(UserSet o) const { return UserSet(mask_ & o.mask_); }
    constexpr UserSet minus(UserSet o) const { return UserSet(mask_ & ~o.mask_); }

    constexpr bool operator==(const UserSet&) const = default;
    constexpr auto operator<=>(const UserSet&) const = default;

    std::string to_string() const;

private:
    std::uint32_t mask_ = 0;
};

/// Bijection between sub-queue indices [0, M) and the non-empty subsets of
/// the user set, M = 2^N - 1. Index 0 is the full set; the rest are ordered
/// by decreasing cardinality, ties by position in the binary-reflected Gray
/// code. For N = 3 this yields {1,2,3}, {1,2}, {2,3}, {1,3}, {1}, {2}, {3}.
class SubQueueLayout {
public:
    explicit SubQueueLayout(int n_users);

    int n_users() const { return n_users_; }
    int size() const { return static_cast<int>(sets_.size()); }
    UserSet full_set() const { return UserSet::full(n_users_); }

    UserSet index_set(int index) const;
    /// Throws std::invalid_argument for the empty set or a set outside the user range.
    int index_of(UserSet set) const;

private:
    int n_users_;
    std::vector<UserSet> sets_;
    std::vector<int> index_by_mask_;
};

UserSet index_set_of(int n_users, int index);

struct Packet {
    std::uint64_t id = 0;
    std::int64_t arrival_slot = 0;
    std::optional<std::int64_t> deadline_slot;

    std::int64_t age(std::int64_t slot) const { return slot - arrival_slot; }
    bool operator==(const Packet&) const = default;
};

struct SubQueue {
    int index = 0;
    UserSet index_set;
    std::deque<Packet> packets;

    bool operator==(const SubQueue&) const = default;
};

/// Where a packet lands in its destination sub-queue after partial reception.
enum class MoveInsertion { tail, head };

/// The M sub-queues held at the transmitter.
class QueueSystem {
public:
    explicit QueueSystem(int n_users);
    explicit QueueSystem(std::shared_ptr<const SubQueueLayout> layout);

    int n_users() const { return layout_->n_users(); }
    int size() const { return static_cast<int>(queues_.size()); }
    const SubQueueLayout& layout() const { return *layout_; }
    const std::shared_ptr<const SubQueueLayout>& layout_ptr() const { return layout_; }

    const SubQueue& queue(int index) const { return queues_.at(index); }
    SubQueue& queue(int index) { return queues_.at(index); }

    std::int64_t backlog(int index) const {
        return static_cast<std::int64_t>(queues_.at(index).packets.size());
    }
    std::vector<std::int64_t> backlog_vector() const;
    std::vector<bool> occupancy() const;

    void push_arrival(const Packet& packet) { queues_[0].packets.push_back(packet); }

    bool operator==(const QueueSystem& other) const { return queues_ == other.queues_; }

private:
    std::shared_ptr<const SubQueueLayout> layout_;
    std::vector<SubQueue> queues_;
};

std::int64_t total_backlog(const QueueSystem& q);

/// Users whose feedback bit was an ACK for this slot's coded packet.
struct ReceptionOutcome {
    UserSet received;
};

enum class Fate { leave, move, stay };

struct RelocationEvent {
    std::uint64_t packet_id = 0;
    int from = 0;
    Fate fate = Fate::stay;
    int to = -1;  // destination sub-queue when fate == move

    bool operator==(const RelocationEvent&) const = default;
};

struct RelocationResult {
    QueueSystem state;
    std::vector<RelocationEvent> events;
};

/// Applies one slot's feedback to the head-of-line packets of the
/// participating sub-queues. Empty participants contribute nothing.
/// Throws std::invalid_argument if participant index sets overlap.
RelocationResult relocate(const QueueSystem& q, std::span<const int> participating,
                          ReceptionOutcome outcome,
                          MoveInsertion insertion = MoveInsertion::tail);

/// In-place form used by the simulation loop.
std::vector<RelocationEvent> relocate_in_place(QueueSystem& q,
                                               std::span<const int> participating,
                                               ReceptionOutcome outcome,
                                               MoveInsertion insertion = MoveInsertion::tail);

/// Replays an event log produced by relocate.
void apply_events(QueueSystem& q, std::span<const RelocationEvent> events,
                  MoveInsertion insertion = MoveInsertion::tail);

/// Union of the index sets of participants that hold a head-of-line packet.
UserSet contributing_users(const QueueSystem& q, std::span<const int> participating);

}  // namespace ncsched

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "ncsched/core_model.hpp"
#include "test_util.hpp"

using namespace ncsched;

TEST_CASE("index_set_of reproduces the three-receiver table") {
    CHECK(index_set_of(3, 0) == UserSet::of({1, 2, 3}));
    CHECK(index_set_of(3, 1) == UserSet::of({1, 2}));
    CHECK(index_set_of(3, 2) == UserSet::of({2, 3}));
    CHECK(index_set_of(3, 3) == UserSet::of({1, 3}));
    CHECK(index_set_of(3, 4) == UserSet::of({1}));
    CHECK(index_set_of(3, 5) == UserSet::of({2}));
    CHECK(index_set_of(3, 6) == UserSet::of({3}));
    CHECK(index_set_of(1, 0) == UserSet::of({1}));
}

TEST_CASE("index_set_of rejects out-of-range indices") {
    CHECK_THROWS_AS(index_set_of(3, 7), std::out_of_range);
    CHECK_THROWS_AS(index_set_of(3, -1), std::out_of_range);
    CHECK_THROWS_AS(SubQueueLayout(0), std::invalid_argument);
    CHECK_THROWS_AS(SubQueueLayout(kMaxUsers + 1), std::invalid_argument);
}

TEST_CASE("layout is a bijection onto the non-empty subsets, ordered by cardinality") {
    for (int n = 1; n <= 10; ++n) {
        const SubQueueLayout layout(n);
        REQUIRE(layout.size() == (1 << n) - 1);
        CHECK(layout.index_set(0) == UserSet::full(n));
        std::set<std::uint32_t> seen;
        for (int i = 0; i < layout.size(); ++i) {
            const UserSet s = layout.index_set(i);
            CHECK_FALSE(s.empty());
            CHECK(s.subset_of(UserSet::full(n)));
            CHECK(layout.index_of(s) == i);
            seen.insert(s.mask());
            if (i > 0) CHECK(layout.index_set(i - 1).size() >= s.size());
        }
        CHECK(seen.size() == static_cast<std::size_t>(layout.size()));
    }
    CHECK_THROWS(SubQueueLayout(3).index_of(UserSet{}));
}

TEST_CASE("relocate: full reception removes the packet") {
    auto q = testutil::make_state(3, {1, 0, 0, 0, 0, 0, 0});
    const std::vector<int> parts{0};
    const auto r = relocate(q, parts, {UserSet::of({1, 2, 3})});
    CHECK(total_backlog(r.state) == 0);
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].fate == Fate::leave);
    CHECK(total_backlog(q) == 1);  // input untouched
}

TEST_CASE("relocate: user 3 alone receiving moves the q_0 head to {1,2}") {
    auto q = testutil::make_state(3, {2, 0, 0, 0, 0, 0, 0});
    const std::vector<int> parts{0};
    const auto r = relocate(q, parts, {UserSet::of({3})});
    CHECK(r.state.backlog(0) == 1);
    CHECK(r.state.backlog(1) == 1);
    CHECK(r.state.queue(1).index_set == UserSet::of({1, 2}));
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0] == RelocationEvent{1, 0, Fate::move, 1});
}

TEST_CASE("relocate: singleton schedule with {2,3} received") {
    auto q = testutil::make_state(3, {0, 0, 0, 0, 1, 1, 1});
    const std::vector<int> parts{4, 5, 6};
    const auto r = relocate(q, parts, {UserSet::of({2, 3})});
    CHECK(r.state.backlog(4) == 1);
    CHECK(r.state.backlog(5) == 0);
    CHECK(r.state.backlog(6) == 0);
    REQUIRE(r.events.size() == 3);
    CHECK(r.events[0].fate == Fate::stay);
    CHECK(r.events[1].fate == Fate::leave);
    CHECK(r.events[2].fate == Fate::leave);
}

TEST_CASE("relocate: empty participants contribute nothing; overlap is rejected") {
    auto q = testutil::make_state(3, {0, 1, 0, 0, 0, 0, 0});
    const std::vector<int> parts{1, 6};
    const auto r = relocate(q, parts, {UserSet::of({1})});
    CHECK(r.events.size() == 1);
    CHECK(r.state.backlog(5) == 1);  // q_1 {1,2} -> {2} = q_5

    const std::vector<int> overlapping{1, 4};
    CHECK_THROWS_AS(relocate(q, overlapping, {}), std::invalid_argument);
}

TEST_CASE("relocate: head insertion puts moved packets at the front") {
    auto q = testutil::make_state(3, {1, 1, 0, 0, 0, 0, 0});
    const std::vector<int> parts{0};
    const auto tail = relocate(q, parts, {UserSet::of({3})}, MoveInsertion::tail);
    const auto head = relocate(q, parts, {UserSet::of({3})}, MoveInsertion::head);
    CHECK(tail.state.queue(1).packets.back().id == 1);
    CHECK(head.state.queue(1).packets.front().id == 1);
}

TEST_CASE("total_backlog") {
    CHECK(total_backlog(QueueSystem(3)) == 0);
    CHECK(total_backlog(testutil::make_state(3, {3, 1, 0, 0, 0, 0, 0})) == 4);
    auto q = testutil::make_state(3, {3, 1, 0, 0, 0, 0, 0});
    const std::vector<int> parts{0};
    CHECK(total_backlog(relocate(q, parts, {UserSet::full(3)}).state) == 3);
}

// Random schedules of disjoint sub-queues driven by random feedback: every
// contributing packet gets exactly one event, packets are conserved, and
// replaying the event log reproduces the state.
TEST_CASE("property: relocate conserves packets and replays bit-exactly") {
    auto rng = testutil::make_rng(7);
    for (int n = 1; n <= 5; ++n) {
        const SubQueueLayout layout(n);
        std::vector<std::int64_t> backlog(layout.size());
        for (auto& b : backlog) b = static_cast<std::int64_t>(rng() % 3);
        QueueSystem state = testutil::make_state(n, backlog);
        std::int64_t delivered = 0;
        const std::int64_t initial = total_backlog(state);

        for (int step = 0; step < 500; ++step) {
            // Greedy random disjoint participant set.
            std::vector<int> parts;
            UserSet used;
            for (int tries = 0; tries < 8; ++tries) {
                const int i = static_cast<int>(rng() % layout.size());
                if (used.disjoint(layout.index_set(i))) {
                    parts.push_back(i);
                    used = used | layout.index_set(i);
                }
            }
            const UserSet received(static_cast<std::uint32_t>(rng()) & UserSet::full(n).mask());
            int contributing = 0;
            for (int i : parts) contributing += !state.queue(i).packets.empty();

            const auto r = relocate(state, parts, {received});
            CHECK(static_cast<int>(r.events.size()) == contributing);
            for (const auto& ev : r.events) delivered += ev.fate == Fate::leave;

            QueueSystem replayed = state;
            apply_events(replayed, r.events);
            CHECK(replayed == r.state);

            state = r.state;
            CHECK(total_backlog(state) + delivered == initial);
        }
    }
}

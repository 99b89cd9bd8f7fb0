#include <doctest.h>

#include <algorithm>
#include <set>

#include "branchmin/engine.hpp"
#include "branchmin/verify.hpp"
#include "helpers.hpp"

using namespace branchmin;
using testing::make_lts;

namespace {

std::set<index_t> as_set(std::vector<index_t> v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_SUITE("splitter") {

TEST_CASE("every bottom state marked and no non-bottom states: U is empty") {
    Lts l = make_lts(4, 0, {{0, "a", 3}, {1, "a", 3}, {2, "a", 3}, {0, "b", 3}});
    Engine e(l);
    e.split_bunch(0);
    auto list = e.splitter_list();
    REQUIRE(list.size() == 2);
    // primary is the b-slice (one transition); secondary holds a-steps of 0, 1, 2
    index_t secondary = list[1];
    for (index_t t : e.slice_transitions(secondary)) e.mark(t);
    SplitOutcome o = e.split(e.block_of(0), secondary);
    CHECK(o.u_empty);
    CHECK(o.u_size() == 0);
    CHECK(o.r_size() == 3);
}

TEST_CASE("fixture primary split: U is s0") {
    Lts l = testing::fixture();
    Engine e(l);
    e.split_bunch(0);
    e.stabilize();
    e.split_bunch(0);
    index_t primary = e.splitter_list()[0];
    index_t b = e.block_of(0);
    SplitOutcome o = e.split(b, primary);
    REQUIRE_FALSE(o.u_empty);
    auto order = e.block_states(b);
    auto mid = order.begin() + (o.u_end - o.begin);
    CHECK(as_set({order.begin(), mid}) == std::set<index_t>{0});
    CHECK(as_set({mid, order.end()}) == std::set<index_t>{1, 2, 3, 4, 5});
    CHECK(o.smaller_side() == SplitOutcome::Side::U);
    CHECK(o.finished == SplitOutcome::Side::U);
}

TEST_CASE("fixture splits in order") {
    Lts l = testing::fixture();
    Engine e(l);
    std::vector<std::pair<std::set<index_t>, std::set<index_t>>> splits;
    e.set_trace([&](const TraceEvent& ev) {
        if (ev.kind == TraceEvent::Kind::BlockSplit && !ev.u.empty()) splits.push_back({as_set(ev.r), as_set(ev.u)});
    });
    e.set_validate(true);
    e.run();
    REQUIRE(splits.size() == 3);
    CHECK(splits[0] == std::make_pair(std::set<index_t>{1, 2, 3, 4, 5}, std::set<index_t>{0}));
    CHECK(splits[1] == std::make_pair(std::set<index_t>{1, 2, 4}, std::set<index_t>{3, 5}));
    CHECK(splits[2] == std::make_pair(std::set<index_t>{2, 4}, std::set<index_t>{1}));
    CHECK(e.violations().empty());
}

TEST_CASE("zones after a split") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        GenConfig cfg;
        cfg.seed = seed;
        Lts l = preprocess(gen_random(cfg)).lts;
        Engine e(l);
        e.set_validate(true);
        e.set_trace([&](const TraceEvent& ev) {
            if (ev.kind != TraceEvent::Kind::BlockSplit) return;
            // no silent step leads from U into R
            std::set<index_t> r = as_set(ev.r), u = as_set(ev.u);
            for (const auto& t : l.transitions)
                if (l.actions.is_internal(t.label) && u.count(t.src)) CHECK_FALSE(r.count(t.tgt));
        });
        e.run();
        INFO("seed " << seed);
        CHECK(e.violations().empty());
    }
}

TEST_CASE("lockstep: the loser never runs ahead") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        GenConfig cfg;
        cfg.seed = seed;
        cfg.n_max = 60;
        cfg.m_max = 200;
        Lts l = preprocess(gen_random(cfg)).lts;
        Engine e(l);
        e.set_validate(true);
        e.run();
        CHECK(e.violations().empty());
    }
}

TEST_CASE("a non-bottom state with an unmarked splitter step lands in R") {
    // 2 is a non-bottom state whose only splitter transition is unmarked.
    Lts l = make_lts(5, 0, {{0, "a", 4}, {1, "b", 4}, {2, "tau", 1}, {2, "a", 4}, {3, "tau", 1}});
    Engine e(l);
    e.set_validate(true);
    e.run();
    CHECK(e.violations().empty());
    CHECK(e.block_of(2) != e.block_of(3));
    CHECK(e.block_of(0) != e.block_of(1));
}

}

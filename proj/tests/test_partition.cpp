#include <doctest.h>

#include <algorithm>
#include <set>

#include "branchmin/engine.hpp"
#include "branchmin/verify.hpp"
#include "helpers.hpp"

using namespace branchmin;
using testing::make_lts;

namespace {

index_t find_transition(const Lts& l, index_t s, const std::string& label, index_t t) {
    index_t a = l.actions.find(label);
    for (index_t i = 0; i < l.m(); ++i)
        if (l.transitions[i] == Transition{s, a, t}) return i;
    return npos;
}

std::vector<std::size_t> slice_sizes(const Engine& e, index_t bunch) {
    std::vector<std::size_t> out;
    for (const auto& s : e.bunch_slices(bunch)) out.push_back(s.size());
    return out;
}

std::vector<TraceEvent> run_traced(Engine& e) {
    std::vector<TraceEvent> events;
    e.set_trace([&](const TraceEvent& ev) { events.push_back(ev); });
    e.set_validate(true);
    e.run();
    return events;
}

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("split_bunch takes the first slice when it is small") {
    // one block; slices a (2), b (5), c (2)
    Lts l = make_lts(5, 0,
                     {{0, "a", 1}, {1, "a", 2}, {0, "b", 0}, {1, "b", 1}, {2, "b", 2}, {3, "b", 3}, {4, "b", 4},
                      {3, "c", 4}, {4, "c", 0}});
    Engine e(l);
    REQUIRE(slice_sizes(e, 0) == std::vector<std::size_t>{2, 5, 2});
    index_t small = e.split_bunch(0);
    CHECK(slice_sizes(e, small) == std::vector<std::size_t>{2});
    CHECK(slice_sizes(e, 0) == std::vector<std::size_t>{5, 2});
    for (index_t t : e.bunch_transitions(small)) CHECK(l.actions.labels[l.transitions[t].label] == "a");
}

TEST_CASE("split_bunch falls back to the last slice") {
    Lts l = make_lts(5, 0, {{0, "a", 0}, {1, "a", 1}, {2, "a", 2}, {3, "a", 3}, {4, "a", 4}, {0, "b", 1}, {1, "b", 2}});
    Engine e(l);
    REQUIRE(slice_sizes(e, 0) == std::vector<std::size_t>{5, 2});
    index_t small = e.split_bunch(0);
    CHECK(slice_sizes(e, small) == std::vector<std::size_t>{2});
    for (index_t t : e.bunch_transitions(small)) CHECK(l.actions.labels[l.transitions[t].label] == "b");
}

TEST_CASE("bunch split fills the splitter list and marks") {
    Lts l = make_lts(5, 0,
                     {{0, "a", 1}, {1, "a", 2}, {0, "b", 0}, {1, "b", 1}, {2, "b", 2}, {3, "b", 3}, {4, "b", 4},
                      {3, "c", 4}, {4, "c", 0}});
    Engine e(l);
    index_t small = e.split_bunch(0);
    auto list = e.splitter_list();
    REQUIRE(list.size() == 2);
    index_t primary = list[0], secondary = list[1];
    CHECK(e.bunch_of(e.slice_transitions(primary)[0]) == small);
    CHECK(e.marked_transitions(primary).size() == e.slice_transitions(primary).size());
    // states 0 and 1 also leave by b: one marked transition each
    auto marked = e.marked_transitions(secondary);
    std::set<index_t> sources;
    for (index_t t : marked) sources.insert(l.transitions[t].src);
    CHECK(marked.size() == 2);
    CHECK(sources == std::set<index_t>{0, 1});
}

TEST_CASE("mark is idempotent and visible") {
    Lts l = make_lts(5, 0,
                     {{0, "a", 1}, {1, "a", 2}, {0, "b", 0}, {1, "b", 1}, {2, "b", 2}, {3, "b", 3}, {4, "b", 4},
                      {3, "c", 4}, {4, "c", 0}});
    Engine e(l);
    e.split_bunch(0);
    index_t secondary = e.splitter_list()[1];
    index_t t = find_transition(l, 3, "c", 4);
    REQUIRE(e.slice_of(t) == secondary);
    CHECK_FALSE(e.is_marked(t));
    std::size_t before = e.marked_transitions(secondary).size();
    e.mark(t);
    e.mark(t);
    CHECK(e.is_marked(t));
    CHECK(e.marked_transitions(secondary).size() == before + 1);
    auto marked = e.marked_transitions(secondary);
    CHECK(std::find(marked.begin(), marked.end(), t) != marked.end());
}

TEST_CASE("fixture: the remainder slice splits along the first block split") {
    Lts l = testing::fixture();
    Engine e(l);
    e.split_bunch(0);  // d-slice
    e.stabilize();
    CHECK(e.block_count() == 2);
    e.split_bunch(0);  // a-slice
    e.stabilize();
    std::vector<index_t> s0_b{find_transition(l, 0, "b", 7), find_transition(l, 0, "b", 8), find_transition(l, 0, "b", 9)};
    std::vector<index_t> s1_b{find_transition(l, 1, "b", 7), find_transition(l, 1, "b", 8)};
    index_t u_slice = e.slice_of(s0_b[0]), r_slice = e.slice_of(s1_b[0]);
    CHECK(u_slice != r_slice);
    CHECK(e.slice_transitions(u_slice).size() == 3);
    CHECK(e.slice_transitions(r_slice).size() == 2);
    CHECK(e.violations().empty());
    CHECK(validate_engine(e).empty());
}

TEST_CASE("two independent states split one to one") {
    Lts l = make_lts(3, 0, {{0, "a", 2}, {1, "b", 2}});
    Engine e(l);
    auto events = run_traced(e);
    bool saw = false;
    for (const auto& ev : events) {
        CHECK(ev.kind != TraceEvent::Kind::NewBunch);
        if (ev.kind == TraceEvent::Kind::BlockSplit && !ev.u.empty()) {
            CHECK(ev.u.size() == 1);
            CHECK(ev.r.size() == 1);
            saw = true;
        }
    }
    CHECK(saw);
    CHECK(e.block_count() == 3);
    CHECK(e.violations().empty());
}

TEST_CASE("a tau across the split becomes non-inert") {
    Lts l = make_lts(3, 0, {{0, "tau", 1}, {0, "a", 2}, {1, "b", 2}});
    index_t tau = find_transition(l, 0, "tau", 1);
    Engine e(l);
    CHECK(e.is_inert(tau));
    auto events = run_traced(e);
    CHECK_FALSE(e.is_inert(tau));
    std::vector<index_t> fresh;
    for (const auto& ev : events)
        if (ev.kind == TraceEvent::Kind::NewBunch) fresh.insert(fresh.end(), ev.transitions.begin(), ev.transitions.end());
    CHECK(fresh == std::vector<index_t>{tau});
    CHECK(e.violations().empty());
}

TEST_CASE("fixture: new tau bunch and new bottom states") {
    Lts l = testing::fixture();
    Engine e(l);
    auto events = run_traced(e);
    std::vector<std::set<std::pair<index_t, index_t>>> bunches;
    std::vector<index_t> bottoms;
    for (const auto& ev : events) {
        if (ev.kind == TraceEvent::Kind::NewBunch) {
            std::set<std::pair<index_t, index_t>> ts;
            for (index_t t : ev.transitions) ts.insert({l.transitions[t].src, l.transitions[t].tgt});
            bunches.push_back(ts);
        }
        if (ev.kind == TraceEvent::Kind::NewBottom) bottoms.push_back(ev.state);
    }
    REQUIRE(bunches.size() == 2);
    CHECK(bunches[0] == std::set<std::pair<index_t, index_t>>{{1, 3}, {2, 3}, {4, 3}, {4, 5}});
    CHECK(bunches[1] == std::set<std::pair<index_t, index_t>>{{2, 1}});
    CHECK(bottoms == std::vector<index_t>{1, 2});
    CHECK(e.violations().empty());
}

TEST_CASE("tau steps into the part that stays behind join the new bunch") {
    // b is split off; R = {0, 1, 3}, U = {2}; then 1 ->tau 2 singles out {1}
    // and 1 ->tau 0 becomes non-inert as well.
    Lts l = make_lts(5, 0, {{0, "tau", 3}, {1, "tau", 0}, {1, "tau", 2}, {2, "a", 4}, {3, "b", 4}, {0, "a", 4}});
    Engine e(l);
    e.set_validate(true);
    index_t small = e.split_bunch(0);
    CHECK(l.actions.labels[l.transitions[e.bunch_transitions(small)[0]].label] == "b");
    e.stabilize();
    index_t to_u = find_transition(l, 1, "tau", 2), to_r = find_transition(l, 1, "tau", 0);
    CHECK_FALSE(e.is_inert(to_u));
    CHECK_FALSE(e.is_inert(to_r));
    CHECK(e.bunch_of(to_u) == e.bunch_of(to_r));
    CHECK(e.slice_of(to_u) == e.slice_of(to_r));
    CHECK(e.bunch_slices(e.bunch_of(to_u)).size() == 2);
    CHECK(e.bottom_states(e.block_of(1)) == std::vector<index_t>{1});
    CHECK(e.violations().empty());
    CHECK(validate_engine(e).empty());
}

TEST_CASE("a block without new non-inert steps gets no new bunch") {
    Lts l = make_lts(4, 0, {{0, "a", 3}, {1, "a", 3}, {1, "b", 3}, {2, "b", 3}});
    Engine e(l);
    auto events = run_traced(e);
    for (const auto& ev : events) CHECK(ev.kind != TraceEvent::Kind::NewBunch);
    CHECK(e.violations().empty());
}

TEST_CASE("a new bottom state without visible steps marks nothing") {
    // 1 ->tau 2 is the last inert step of 1; afterwards 1 has only that step.
    Lts l = make_lts(4, 0, {{0, "a", 3}, {1, "tau", 2}, {2, "b", 3}, {1, "tau", 0}});
    Engine e(l);
    auto events = run_traced(e);
    CHECK(e.violations().empty());
    CHECK(same_partition(Partition{{e.block_of(0), e.block_of(1), e.block_of(2), e.block_of(3)}, e.block_count()},
                         oracle_minimize(l)));
}

}

#include <doctest.h>

#include <set>

#include "branchmin/engine.hpp"
#include "branchmin/minimizer.hpp"
#include "branchmin/verify.hpp"
#include "helpers.hpp"

using namespace branchmin;
using testing::make_lts;

namespace {

// One more signature round by hand: states sharing a block must see the
// same (action, block) pairs behind silent steps inside the block.
bool is_fixpoint(const Lts& l, const Partition& p) {
    std::vector<std::set<std::pair<index_t, index_t>>> sig(l.n);
    for (index_t s = 0; s < l.n; ++s) {
        std::vector<index_t> todo{s};
        std::set<index_t> seen{s};
        while (!todo.empty()) {
            index_t r = todo.back();
            todo.pop_back();
            for (const auto& t : l.transitions) {
                if (t.src != r) continue;
                bool internal = l.actions.is_internal(t.label);
                if (internal && p.block_of[t.tgt] == p.block_of[s]) {
                    if (seen.insert(t.tgt).second) todo.push_back(t.tgt);
                } else {
                    sig[s].insert({internal ? npos : t.label, p.block_of[t.tgt]});
                }
            }
        }
    }
    for (index_t s = 0; s < l.n; ++s)
        for (index_t t = 0; t < l.n; ++t)
            if (p.block_of[s] == p.block_of[t] && sig[s] != sig[t]) return false;
    return true;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("oracle: deadlocks are one block") {
    Lts l = make_lts(5, 0, {});
    CHECK(oracle_minimize(l).block_count == 1);
}

TEST_CASE("oracle: different actions separate") {
    Lts l = make_lts(4, 0, {{0, "a", 1}, {2, "b", 3}});
    Partition p = oracle_minimize(l);
    CHECK(p.block_of[0] != p.block_of[2]);
    CHECK(p.block_of[1] == p.block_of[3]);
    CHECK(p.block_count == 3);
}

TEST_CASE("oracle: a two-state k-label system with k = 3 has two blocks") {
    Partition p = oracle_minimize(gen_appendix_a(3));
    CHECK(p.block_count == 2);
}

TEST_CASE("oracle: inert tau is absorbed, a choice-changing tau is not") {
    Lts inert = make_lts(3, 0, {{0, "tau", 1}, {1, "a", 2}, {0, "a", 2}});
    CHECK(oracle_minimize(inert).block_of[0] == oracle_minimize(inert).block_of[1]);
    Lts choice = make_lts(4, 0, {{0, "tau", 1}, {1, "a", 2}, {0, "b", 3}});
    CHECK(oracle_minimize(choice).block_of[0] != oracle_minimize(choice).block_of[1]);
}

TEST_CASE("oracle result is a fixpoint") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        GenConfig cfg;
        cfg.seed = seed;
        Lts l = gen_random(cfg);
        CHECK(is_fixpoint(l, oracle_minimize(l)));
    }
}

TEST_CASE("generator: no transitions means one deadlock") {
    GenConfig cfg;
    cfg.m_max = 0;
    Lts l = gen_random(cfg);
    CHECK(l.n == 1);
    CHECK(l.m() == 0);
}

TEST_CASE("generator: reproducible and reachable") {
    GenConfig cfg;
    cfg.seed = 42;
    Lts a = gen_random(cfg), b = gen_random(cfg);
    CHECK(a.transitions == b.transitions);
    CHECK(a.n == b.n);
    cfg.seed = 43;
    CHECK(gen_random(cfg).transitions != a.transitions);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        cfg.seed = seed;
        Lts l = gen_random(cfg);
        CHECK(l.n <= cfg.n_max);
        CHECK(l.m() <= cfg.m_max);
        CHECK(prune_unreachable(l).lts.n == l.n);
    }
}

TEST_CASE("generator: exact size") {
    GenConfig cfg;
    cfg.exact_size = true;
    cfg.n_max = 100;
    cfg.m_max = 400;
    Lts l = gen_random(cfg);
    CHECK(l.n == 100);
    CHECK(l.m() <= 400);
    CHECK(l.m() > 350);
}

TEST_CASE("generator: two-state k-label family") {
    Lts one = gen_appendix_a(1);
    CHECK(one.n == 2);
    CHECK(one.m() == 4);
    Lts two = gen_appendix_a(2);
    CHECK(two.m() == 6);
    CHECK(two.actions.labels == std::vector<std::string>{"tau", "a0", "a1", "a2"});
    CHECK(two.actions.is_internal(0));
    CHECK(minimize(gen_appendix_a(256)).quotient.n == 2);
}

TEST_CASE("generator: tau cycle") {
    Lts l = gen_tau_cycle(5);
    CHECK(l.n == 5);
    CHECK(l.m() == 5);
}

TEST_CASE("validator: fresh engine is clean") {
    Engine e(testing::fixture());
    CHECK(validate_engine(e).empty());
}

TEST_CASE("validator: corrupted block_of is reported") {
    Engine e(testing::fixture());
    e.corrupt_block_of_for_testing(0, 1);
    CHECK_FALSE(validate_engine(e).empty());
}

TEST_CASE("validator: clean across a full fixture run") {
    Engine e(testing::fixture());
    e.set_validate(true);
    e.run();
    CHECK(e.violations().empty());
    CHECK(validate_engine(e).empty());
}

TEST_CASE("validator: an unmarked bottom splitter step is reported") {
    // b is split off; in the remainder only 0 and 1 get a marked a-step
    Lts l = make_lts(4, 0, {{0, "a", 3}, {1, "a", 3}, {2, "a", 3}, {0, "b", 3}, {1, "b", 3}});
    Engine e(l);
    e.set_validate(true);
    e.split_bunch(0);
    auto list = e.splitter_list();
    REQUIRE(list.size() == 2);
    // bottom state 2 has an a-step but no marked one
    SplitOutcome o = e.split(e.block_of(0), list[1]);
    (void)o;
    CHECK_FALSE(e.violations().empty());
}

}

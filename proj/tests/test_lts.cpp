#include <doctest.h>

#include "branchmin/lts.hpp"
#include "branchmin/verify.hpp"
#include "helpers.hpp"

using namespace branchmin;

namespace {

std::size_t error_line(std::string_view text) {
    try {
        parse_aut(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_SUITE("lts") {

TEST_CASE("smallest file") {
    Lts l = parse_aut("des (0,1,2)\n(0,\"a\",1)");
    CHECK(l.n == 2);
    CHECK(l.m() == 1);
    CHECK(l.initial == 0);
    CHECK(l.transitions[0] == Transition{0, 0, 1});
    CHECK_FALSE(l.actions.is_internal(0));
}

TEST_CASE("duplicates collapse and tau is internal") {
    Lts l = parse_aut("des (0,2,2)\n(0,\"tau\",1)\n(0,\"tau\",1)\n");
    CHECK(l.m() == 1);
    CHECK(l.actions.is_internal(l.transitions[0].label));
}

TEST_CASE("default internal labels") {
    Lts l = parse_aut("des (0,3,2)\n(0,i,1)\n(0,\"tau\",1)\n(0,\"TAU\",1)\n");
    CHECK(l.actions.is_internal(l.actions.find("i")));
    CHECK(l.actions.is_internal(l.actions.find("tau")));
    CHECK_FALSE(l.actions.is_internal(l.actions.find("TAU")));
}

TEST_CASE("header whitespace, bare labels and CRLF") {
    Lts l = parse_aut("des ( 1 , 2 , 3 )\r\n(0, a, 1)\r\n( 1 ,\"b c\", 2 )\r\n");
    CHECK(l.initial == 1);
    CHECK(l.n == 3);
    CHECK(l.m() == 2);
    CHECK(l.actions.find("b c") != npos);
}

TEST_CASE("labels with commas and parentheses when quoted") {
    Lts l = parse_aut("des (0,1,2)\n(0,\"send(1,2)\",1)\n");
    CHECK(l.actions.labels[0] == "send(1,2)");
}

TEST_CASE("errors carry line numbers") {
    CHECK(error_line("") == 1);
    CHECK(error_line("dex (0,0,1)\n") == 1);
    CHECK(error_line("des (0,0)\n") == 1);
    CHECK(error_line("des (0,0,0)\n") == 1);
    CHECK(error_line("des (0,1,2)\n(0,\"a\",2)\n") == 2);
    CHECK(error_line("des (0,2,2)\n(0,\"a\",1)\n(5,\"a\",1)\n") == 3);
    CHECK(error_line("des (0,1,2)\n(0,\"a,1)\n") == 2);
    CHECK(error_line("des (0,2,2)\n(0,\"a\",1)\n") == 2);
    CHECK(error_line("des (0,1,2)\n(0,\"a\",1)\n(1,\"a\",0)\n") == 3);
    CHECK(error_line("des (0,1,2)\n(0,a b,1)\n") == 2);
}

TEST_CASE("unterminated quote message") {
    try {
        parse_aut("des (0,1,2)\n(0,\"abc,1)\n");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("unterminated quote") != std::string::npos);
    }
}

TEST_CASE("writer output") {
    Lts one;
    CHECK(write_aut(one) == "des (0,0,1)\n");

    Lts l = testing::make_lts(2, 0, {{1, "a", 0}, {0, "a", 1}});
    CHECK(write_aut(l) == "des (0,2,2)\n(0,\"a\",1)\n(1,\"a\",0)\n");
}

TEST_CASE("round trip and idempotent normalization") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        GenConfig cfg;
        cfg.seed = seed;
        Lts l = gen_random(cfg);
        Lts back = parse_aut(write_aut(l));
        CHECK(same_lts(back, l));
        Lts twice = l;
        normalize(twice);
        CHECK(twice.transitions == l.transitions);
    }
}

TEST_CASE("deduplicated count never exceeds the declared one") {
    Lts l = parse_aut("des (0,4,3)\n(0,a,1)\n(0,a,1)\n(1,b,2)\n(1,b,2)\n");
    CHECK(l.m() == 2);
    CHECK(l.n == 3);
}

TEST_CASE("set_internal") {
    Lts l = testing::make_lts(3, 0, {{0, "a", 1}, {1, "tau", 2}});
    Lts none = set_internal(l, {});
    for (index_t i = 0; i < none.actions.size(); ++i) CHECK_FALSE(none.actions.is_internal(i));
    CHECK(none.transitions == l.transitions);

    Lts only_a = set_internal(testing::make_lts(2, 0, {{0, "a", 1}, {1, "a", 0}}), {"a"});
    for (const auto& t : only_a.transitions) CHECK(only_a.actions.is_internal(t.label));

    Lts l2 = testing::make_lts(3, 0, {{0, "i", 1}, {1, "tau", 2}, {2, "b", 0}});
    CHECK(same_lts(set_internal(l2, {"tau", "i"}), l2));

    CHECK_THROWS_AS(set_internal(l, {"nope"}), std::invalid_argument);
}

TEST_CASE("state maps compose") {
    StateMap a{{1, npos, 0}};
    StateMap b{{2, 3}};
    CHECK(a.then(b).map == std::vector<index_t>{3, npos, 2});
    CHECK(StateMap::identity(3).map == std::vector<index_t>{0, 1, 2});
}

}

#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "branchmin/lts.hpp"

namespace testing {

using branchmin::index_t;
using branchmin::Lts;

struct Edge {
    index_t src;
    std::string label;
    index_t tgt;
};

inline Lts make_lts(index_t n, index_t initial, const std::vector<Edge>& edges) {
    Lts l;
    l.n = n;
    l.initial = initial;
    for (const auto& e : edges) {
        index_t a = l.actions.intern(e.label, branchmin::is_default_internal(e.label));
        l.transitions.push_back({e.src, a, e.tgt});
    }
    branchmin::normalize(l);
    return l;
}

// States s0..s5 are 0..5, the deadlocks x0..x3 are 6..9.
inline Lts fixture() { return branchmin::read_aut_file(TEST_DATA_DIR "/fixture10.aut"); }

inline std::vector<std::vector<index_t>> blocks_of(const std::vector<index_t>& block_of) {
    index_t count = 0;
    for (index_t b : block_of)
        if (b != branchmin::npos && b + 1 > count) count = b + 1;
    std::vector<std::vector<index_t>> out(count);
    for (index_t s = 0; s < block_of.size(); ++s)
        if (block_of[s] != branchmin::npos) out[block_of[s]].push_back(s);
    return out;
}

}  // namespace testing

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "branchmin/engine.hpp"
#include "branchmin/lts.hpp"
#include "branchmin/minimizer.hpp"

namespace branchmin {

// Naive signature refinement. Each round recomputes, per state, the set of
// (action, target block) pairs seen after silent steps inside its block.
// Works on any LTS, τ-cycles included. Meant for small inputs.
Partition oracle_minimize(const Lts& lts);

struct GenConfig {
    index_t n_max = 40;
    index_t m_max = 160;
    index_t label_count = 4;  // including "tau"
    double tau_fraction = 0.4;
    std::uint64_t seed = 0;
    // Use exactly n_max states and m_max transition draws.
    bool exact_size = false;
};

// Every state is reachable from the initial state 0.
Lts gen_random(const GenConfig& cfg);
// States s0 = 0 and s1 = 1 (initial); labels tau, a0 .. ak.
Lts gen_appendix_a(index_t k);
// i -tau-> i+1 mod n.
Lts gen_tau_cycle(index_t n);

// Exhaustive consistency scan of the engine state.
std::vector<std::string> validate_engine(const Engine& e);

}  // namespace branchmin

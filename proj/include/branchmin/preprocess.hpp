#pragma once

#include "branchmin/lts.hpp"

namespace branchmin {

struct PreprocessReport {
    index_t removed_unreachable = 0;
    index_t scc_count_contracted = 0;  // τ-SCCs with more than one state
    index_t tau_self_loops_dropped = 0;
    StateMap map;  // original -> preprocessed
};

struct Reduced {
    Lts lts;
    StateMap map;
};

// States reachable from the initial state, renumbered in original order
// (initial becomes 0). Unreachable states map to npos.
Reduced prune_unreachable(const Lts& lts);

struct Contracted {
    Lts lts;
    StateMap map;
    index_t sccs_contracted = 0;
    index_t self_loops_dropped = 0;
};

// Collapse every strongly connected component of the internal-transition
// subgraph into one state. New states are numbered in order of their lowest
// member. Internal self-loops are dropped.
Contracted contract_tau_sccs(const Lts& lts);

struct Preprocessed {
    Lts lts;
    PreprocessReport report;
};

Preprocessed preprocess(const Lts& lts, bool prune = true);

// Starting point of the refinement: two blocks (states that can silently
// reach a visible step, and the rest) and one bunch of all transitions that
// are not inert under that partition.
struct InitialPartition {
    std::vector<index_t> block_of;  // 0 = can reach visible (if nonempty)
    index_t block_count = 0;
    std::vector<index_t> bunch;  // transition indices into lts.transitions
};

InitialPartition initial_partition(const Lts& lts);

// True iff the internal-transition subgraph is acyclic (self-loops included).
bool tau_acyclic(const Lts& lts);

}  // namespace branchmin

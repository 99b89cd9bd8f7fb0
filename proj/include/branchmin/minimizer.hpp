#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "branchmin/engine.hpp"
#include "branchmin/lts.hpp"
#include "branchmin/preprocess.hpp"

namespace branchmin {

// Dense block ids per state; npos for states that were not considered
// (unreachable ones when pruning).
struct Partition {
    std::vector<index_t> block_of;
    index_t block_count = 0;
};

// Renumber blocks in order of their smallest member.
Partition canonical(const Partition& p);
// Same equivalence relation, and the same states left out.
bool same_partition(const Partition& a, const Partition& b);
bool is_discrete(const Partition& p);

struct MinimizeOptions {
    bool prune_unreachable = true;
    bool validate = false;
    TraceSink trace;  // events use preprocessed state numbers
};

struct MinimizeResult {
    Partition partition;  // over the original states
    Lts quotient;
    StateMap map;  // original state -> quotient state
    WorkCounters work;
    PreprocessReport report;
    std::vector<std::string> violations;
    index_t pre_n = 0;
    std::size_t pre_m = 0;
};

MinimizeResult minimize(const Lts& lts, const MinimizeOptions& opts = {});

// Quotient of `lts` under `p`: one state per block, inert steps dropped, all
// internal labels written as the first internal label.
Lts quotient(const Lts& lts, const Partition& p);

class LabelConflict : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DisjointUnion {
    Lts lts;
    index_t offset = 0;  // states of the second LTS start here
};

// Labels are unified by name; a name that is internal on one side and
// visible on the other throws LabelConflict.
DisjointUnion disjoint_union(const Lts& a, const Lts& b);

struct EquivalenceResult {
    bool equivalent = false;
    Partition partition;  // over the states of the disjoint union
};

EquivalenceResult equivalent(const Lts& a, const Lts& b, bool validate = false);

}  // namespace branchmin

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "branchmin/lts.hpp"
#include "branchmin/splitter.hpp"

namespace branchmin {

struct WorkCounters {
    std::uint64_t bunch_units = 0;
    std::uint64_t smaller_block_units = 0;
    std::uint64_t new_bottom_units = 0;

    std::uint64_t total() const { return bunch_units + smaller_block_units + new_bottom_units; }
};

struct TraceEvent {
    enum class Kind { BunchSplit, BlockSplit, NewBunch, NewBottom };
    Kind kind = Kind::BunchSplit;
    index_t block = npos;                // BlockSplit: block before the split; NewBottom: its block
    index_t state = npos;                // NewBottom
    index_t action = npos;               // BunchSplit: action of the split-off slice
    index_t target_block = npos;         // BunchSplit: target block of the split-off slice
    std::vector<index_t> r, u;           // BlockSplit: the two halves (states)
    std::vector<index_t> transitions;    // NewBunch / BunchSplit: transitions of the new bunch
    bool primary = false;                // BlockSplit: splitter was a primary slice
};

using TraceSink = std::function<void(const TraceEvent&)>;

class Engine;
std::vector<std::string> validate_engine(const Engine& e);

// Mutable state of the partition refinement. Constructed from a τ-acyclic
// LTS; the constructor establishes the initial partitions.
//
// Per transition t the engine keeps src, tgt and action, the positions of t
// in the four orderings (bunch order, block-bunch-slice order, per-source,
// per-target) and three slice references (action-block-slice, block-bunch-
// slice, per-source bunch group): ten words.
class Engine {
public:
    explicit Engine(const Lts& lts);

    void set_trace(TraceSink sink) { trace_ = std::move(sink); }
    void set_validate(bool on) { validate_ = on; }

    // Main loop: split bunches until all are trivial.
    void run();

    index_t state_count() const { return n_; }
    index_t transition_count() const { return m_; }
    index_t block_count() const { return static_cast<index_t>(blocks_.size()); }
    index_t block_of(index_t s) const { return block_of_[s]; }
    index_t bunch_count() const;
    const WorkCounters& work() const { return work_; }
    const std::vector<std::string>& violations() const { return violations_; }

    index_t action_of(index_t t) const { return act_[t]; }
    index_t src(index_t t) const { return src_[t]; }
    index_t tgt(index_t t) const { return tgt_[t]; }
    bool is_inert(index_t t) const { return act_[t] == tau_ && block_of_[src_[t]] == block_of_[tgt_[t]]; }
    index_t tau_action() const { return tau_; }

    // States of a block in the order of the state array.
    std::vector<index_t> block_states(index_t b) const;
    std::vector<index_t> bottom_states(index_t b) const;

    // Fault injection for validator tests.
    void corrupt_block_of_for_testing(index_t s, index_t b) { block_of_[s] = b; }

    // Refinement primitives, exposed for tests.
    bool bunch_trivial(index_t bunch) const;
    index_t bunch_of(index_t t) const { return abs_[abs_of_[t]].bunch; }
    std::vector<index_t> bunch_transitions(index_t bunch) const;
    std::vector<std::vector<index_t>> bunch_slices(index_t bunch) const;  // per action-block-slice
    index_t slice_of(index_t t) const { return bbs_of_[t]; }
    std::vector<index_t> slice_transitions(index_t slice) const;
    std::vector<index_t> marked_transitions(index_t slice) const;
    bool slice_stable(index_t slice) const { return bbs_[slice].stable; }
    std::vector<index_t> splitter_list() const;
    bool is_marked(index_t t) const;

    // Split the first action-block-slice of the bunch off if it holds at most
    // half of the bunch, else the last. Returns the new bunch. Adds the
    // splitters of all splittable blocks to the splitter list and marks.
    index_t split_bunch(index_t bunch);
    void mark(index_t t);
    // Split blocks under the splitter list until it is empty.
    void stabilize();

    // Split block b into the states that can silently reach `slice` and the
    // rest, running both searches in lockstep.
    SplitOutcome split(index_t b, index_t slice);

    friend std::vector<std::string> validate_engine(const Engine& e);

private:
    struct Block {
        index_t begin, bottom_end, end;
        index_t stable_head = npos;  // list of stable block-bunch-slices
    };
    struct Bunch {
        index_t begin, end;  // range in ba_
        bool on_stack = false;
    };
    struct Abs {  // action-block-slice
        index_t begin, end;  // range in ba_
        index_t bunch;
        index_t action;
        index_t target_block;
        index_t child = npos;  // scratch during a block split
        std::uint64_t stamp = 0;
    };
    struct Bbs {  // block-bunch-slice
        index_t begin, marked_end, end;  // range in bb_; marked prefix
        index_t bunch;
        index_t block;
        bool stable = true;
        bool primary = false;
        index_t prev = npos, next = npos;
        index_t child = npos;  // scratch during splits
        std::uint64_t stamp = 0;
    };
    struct Group {  // outgoing transitions of one state in one bunch
        index_t begin, end;  // range in out_
        index_t child = npos;
        std::uint64_t stamp = 0;
    };

    struct BlockSplitResult {
        index_t r_block, u_block;
        std::vector<index_t> newly_noninert;  // τ-transitions R -> U
    };

    // construction
    void build(const Lts& lts);

    // lists
    void list_unlink(index_t x);
    void stable_push(index_t x, index_t block);
    void splitter_push_back(index_t x);
    void splitter_insert_after(index_t x, index_t after);
    void make_stable(index_t x);
    void make_unstable_back(index_t x, bool primary);

    // array swaps
    void swap_states(index_t i, index_t j);
    void swap_ba(index_t i, index_t j);
    void swap_bb(index_t i, index_t j);
    void swap_out(index_t i, index_t j);
    void swap_in(index_t i, index_t j);

    // slice carving: move t into child slice located right behind parent
    void bbs_move_to_child(index_t t, index_t parent, index_t child);
    index_t new_abs(index_t begin, index_t bunch, index_t action, index_t target_block);
    index_t new_bbs(index_t begin, index_t bunch, index_t block);
    index_t new_group(index_t begin);

    void note_bunch_maybe_nontrivial(index_t bunch);

    BlockSplitResult split_block(index_t b, const SplitOutcome& o);
    // The part of slice x that starts in `block` after the last block split.
    index_t part_in_block(index_t x, index_t block) const;
    // Moves the given τ-transitions out of the inert regions into `bunch`,
    // appending them to its (single) slice from `block`. Returns the states
    // that became bottom.
    std::vector<index_t> make_noninert(const std::vector<index_t>& ts, index_t bunch);
    index_t new_bunch();
    void register_new_bottom(index_t block, index_t skip_slice1, index_t skip_slice2);

    bool in_zone(index_t s, index_t lo, index_t hi) const { return pos_[s] >= lo && pos_[s] < hi; }
    void validate_checkpoint(const char* where);
    void validate_split(index_t b, index_t slice, const SplitOutcome& o);

    index_t n_ = 0, m_ = 0;
    index_t tau_ = npos;
    std::vector<index_t> src_, tgt_, act_;

    // states
    std::vector<index_t> order_, pos_, block_of_;
    std::vector<Block> blocks_;
    std::vector<index_t> untested_;
    std::vector<std::uint64_t> state_stamp_;

    // (a) per bunch, grouped by action-block-slice; inert tail at [ni_a_, m)
    std::vector<index_t> ba_, ba_pos_, abs_of_;
    index_t ni_a_ = 0;
    std::vector<Bunch> bunches_;
    std::vector<Abs> abs_;
    std::vector<index_t> free_abs_;
    std::vector<index_t> nontrivial_;  // stack of bunch ids

    // (b) per block-bunch-slice; inert tail at [ni_b_, m)
    std::vector<index_t> bb_, bb_pos_, bbs_of_;
    index_t ni_b_ = 0;
    std::vector<Bbs> bbs_;
    std::vector<index_t> free_bbs_;
    index_t splitter_head_ = npos, splitter_tail_ = npos;

    // (c) per source: non-inert grouped by bunch, then inert
    std::vector<index_t> out_, out_pos_, og_;
    std::vector<index_t> out_begin_, out_inert_, out_end_;
    std::vector<Group> groups_;
    std::vector<index_t> free_groups_;

    // (d) per target: inert, then non-inert
    std::vector<index_t> in_, in_pos_;
    std::vector<index_t> in_begin_, in_inert_end_, in_end_;

    std::uint64_t stamp_ = 0;
    std::uint64_t last_split_stamp_ = 0;
    WorkCounters work_;
    TraceSink trace_;
    bool validate_ = false;
    std::vector<std::string> violations_;
};

}  // namespace branchmin

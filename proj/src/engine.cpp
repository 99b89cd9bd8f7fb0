#include "branchmin/engine.hpp"

#include <algorithm>
#include <cassert>

#include "branchmin/preprocess.hpp"

namespace branchmin {

Engine::Engine(const Lts& lts) { build(lts); }

void Engine::build(const Lts& lts) {
    n_ = lts.n;
    m_ = static_cast<index_t>(lts.m());
    for (index_t l = 0; l < lts.actions.size(); ++l)
        if (lts.actions.is_internal(l)) {
            tau_ = l;
            break;
        }
    src_.resize(m_);
    tgt_.resize(m_);
    act_.resize(m_);
    for (index_t t = 0; t < m_; ++t) {
        const auto& tr = lts.transitions[t];
        src_[t] = tr.src;
        tgt_[t] = tr.tgt;
        act_[t] = lts.actions.is_internal(tr.label) ? tau_ : tr.label;
    }

    InitialPartition ip = initial_partition(lts);
    block_of_ = ip.block_of;
    const index_t bc = ip.block_count;
    std::vector<char> inert(m_, 0);
    for (index_t t = 0; t < m_; ++t) inert[t] = act_[t] == tau_ && block_of_[src_[t]] == block_of_[tgt_[t]];

    // (c) per source and (d) per target.
    out_begin_.assign(n_, 0);
    out_inert_.assign(n_, 0);
    out_end_.assign(n_, 0);
    in_begin_.assign(n_, 0);
    in_inert_end_.assign(n_, 0);
    in_end_.assign(n_, 0);
    std::vector<index_t> out_ni(n_, 0), out_deg(n_, 0), in_in(n_, 0), in_deg(n_, 0);
    for (index_t t = 0; t < m_; ++t) {
        ++out_deg[src_[t]];
        ++in_deg[tgt_[t]];
        if (inert[t]) ++in_in[tgt_[t]];
        else ++out_ni[src_[t]];
    }
    index_t acc_o = 0, acc_i = 0;
    for (index_t s = 0; s < n_; ++s) {
        out_begin_[s] = acc_o;
        out_inert_[s] = acc_o + out_ni[s];
        acc_o += out_deg[s];
        out_end_[s] = acc_o;
        in_begin_[s] = acc_i;
        in_inert_end_[s] = acc_i + in_in[s];
        acc_i += in_deg[s];
        in_end_[s] = acc_i;
    }
    out_.resize(m_);
    out_pos_.resize(m_);
    og_.assign(m_, npos);
    in_.resize(m_);
    in_pos_.resize(m_);
    {
        std::vector<index_t> fo_ni(out_begin_), fo_in(out_inert_), fi_in(in_begin_), fi_ni(in_inert_end_);
        for (index_t t = 0; t < m_; ++t) {
            index_t p = inert[t] ? fo_in[src_[t]]++ : fo_ni[src_[t]]++;
            out_[p] = t;
            out_pos_[t] = p;
            index_t q = inert[t] ? fi_in[tgt_[t]]++ : fi_ni[tgt_[t]]++;
            in_[q] = t;
            in_pos_[t] = q;
        }
    }
    for (index_t s = 0; s < n_; ++s)
        if (out_inert_[s] > out_begin_[s]) {
            index_t g = new_group(out_begin_[s]);
            groups_[g].end = out_inert_[s];
            for (index_t p = out_begin_[s]; p < out_inert_[s]; ++p) og_[out_[p]] = g;
        }

    // States grouped per block, bottom states first.
    order_.resize(n_);
    pos_.resize(n_);
    untested_.assign(n_, 0);
    state_stamp_.assign(n_, 0);
    blocks_.resize(bc);
    {
        std::vector<index_t> bottoms(bc, 0), sizes(bc, 0);
        for (index_t s = 0; s < n_; ++s) {
            ++sizes[block_of_[s]];
            if (out_inert_[s] == out_end_[s]) ++bottoms[block_of_[s]];
        }
        index_t acc = 0;
        std::vector<index_t> fill_b(bc), fill_nb(bc);
        for (index_t b = 0; b < bc; ++b) {
            blocks_[b].begin = acc;
            blocks_[b].bottom_end = acc + bottoms[b];
            acc += sizes[b];
            blocks_[b].end = acc;
            fill_b[b] = blocks_[b].begin;
            fill_nb[b] = blocks_[b].bottom_end;
        }
        for (index_t s = 0; s < n_; ++s) {
            index_t b = block_of_[s];
            index_t p = out_inert_[s] == out_end_[s] ? fill_b[b]++ : fill_nb[b]++;
            order_[p] = s;
            pos_[s] = p;
        }
    }

    // (a) non-inert transitions bucketed by (action, target block).
    const index_t labels = std::max<index_t>(lts.actions.size(), 1);
    std::vector<index_t> key_count(static_cast<std::size_t>(labels) * bc + 1, 0);
    auto key = [&](index_t t) { return static_cast<std::size_t>(act_[t]) * bc + block_of_[tgt_[t]]; };
    index_t ni = 0;
    for (index_t t = 0; t < m_; ++t)
        if (!inert[t]) {
            ++key_count[key(t) + 1];
            ++ni;
        }
    for (std::size_t k = 1; k < key_count.size(); ++k) key_count[k] += key_count[k - 1];
    ba_.resize(m_);
    ba_pos_.resize(m_);
    abs_of_.assign(m_, npos);
    {
        index_t tail = ni;
        for (index_t t = 0; t < m_; ++t) {
            index_t p = inert[t] ? tail++ : key_count[key(t)]++;
            ba_[p] = t;
            ba_pos_[t] = p;
        }
    }
    ni_a_ = ni;
    if (ni > 0) {
        bunches_.push_back({0, ni});
        for (index_t p = 0; p < ni; ++p) {
            index_t t = ba_[p];
            if (p == 0 || key(ba_[p - 1]) != key(t)) new_abs(p, 0, act_[t], block_of_[tgt_[t]]);
            abs_.back().end = p + 1;
            abs_of_[t] = static_cast<index_t>(abs_.size() - 1);
        }
    }

    // (b) non-inert transitions grouped by source block.
    bb_.resize(m_);
    bb_pos_.resize(m_);
    bbs_of_.assign(m_, npos);
    {
        std::vector<index_t> cnt(bc + 1, 0);
        for (index_t t = 0; t < m_; ++t)
            if (!inert[t]) ++cnt[block_of_[src_[t]] + 1];
        for (index_t b = 0; b < bc; ++b) cnt[b + 1] += cnt[b];
        std::vector<index_t> start(cnt.begin(), cnt.end() - 1), fill(start);
        index_t tail = ni;
        for (index_t t = 0; t < m_; ++t) {
            index_t p = inert[t] ? tail++ : fill[block_of_[src_[t]]]++;
            bb_[p] = t;
            bb_pos_[t] = p;
        }
        for (index_t b = 0; b < bc; ++b)
            if (fill[b] > start[b]) {
                index_t x = new_bbs(start[b], 0, b);
                bbs_[x].end = fill[b];
                for (index_t p = start[b]; p < fill[b]; ++p) bbs_of_[bb_[p]] = x;
                stable_push(x, b);
            }
    }
    ni_b_ = ni;
    if (ni > 0) note_bunch_maybe_nontrivial(0);
}

// ---------------------------------------------------------------- queries

index_t Engine::bunch_count() const { return static_cast<index_t>(bunches_.size()); }

bool Engine::bunch_trivial(index_t b) const {
    const Bunch& B = bunches_[b];
    return B.begin == B.end || abs_of_[ba_[B.begin]] == abs_of_[ba_[B.end - 1]];
}

std::vector<index_t> Engine::block_states(index_t b) const {
    return {order_.begin() + blocks_[b].begin, order_.begin() + blocks_[b].end};
}

std::vector<index_t> Engine::bottom_states(index_t b) const {
    return {order_.begin() + blocks_[b].begin, order_.begin() + blocks_[b].bottom_end};
}

std::vector<index_t> Engine::bunch_transitions(index_t b) const {
    return {ba_.begin() + bunches_[b].begin, ba_.begin() + bunches_[b].end};
}

std::vector<std::vector<index_t>> Engine::bunch_slices(index_t b) const {
    std::vector<std::vector<index_t>> out;
    for (index_t p = bunches_[b].begin; p < bunches_[b].end;) {
        const Abs& a = abs_[abs_of_[ba_[p]]];
        out.emplace_back(ba_.begin() + a.begin, ba_.begin() + a.end);
        p = a.end;
    }
    return out;
}

std::vector<index_t> Engine::slice_transitions(index_t x) const {
    return {bb_.begin() + bbs_[x].begin, bb_.begin() + bbs_[x].end};
}

std::vector<index_t> Engine::marked_transitions(index_t x) const {
    return {bb_.begin() + bbs_[x].begin, bb_.begin() + bbs_[x].marked_end};
}

bool Engine::is_marked(index_t t) const {
    index_t x = bbs_of_[t];
    return x != npos && bb_pos_[t] < bbs_[x].marked_end;
}

std::vector<index_t> Engine::splitter_list() const {
    std::vector<index_t> out;
    for (index_t x = splitter_head_; x != npos; x = bbs_[x].next) out.push_back(x);
    return out;
}

// ---------------------------------------------------------------- lists

void Engine::list_unlink(index_t x) {
    Bbs& s = bbs_[x];
    if (s.prev != npos) bbs_[s.prev].next = s.next;
    else if (s.stable) {
        if (blocks_[s.block].stable_head == x) blocks_[s.block].stable_head = s.next;
    } else if (splitter_head_ == x) splitter_head_ = s.next;
    if (s.next != npos) bbs_[s.next].prev = s.prev;
    else if (!s.stable && splitter_tail_ == x) splitter_tail_ = s.prev;
    s.prev = s.next = npos;
}

void Engine::stable_push(index_t x, index_t block) {
    Bbs& s = bbs_[x];
    s.stable = true;
    s.prev = npos;
    s.next = blocks_[block].stable_head;
    if (s.next != npos) bbs_[s.next].prev = x;
    blocks_[block].stable_head = x;
}

void Engine::splitter_push_back(index_t x) {
    Bbs& s = bbs_[x];
    s.stable = false;
    s.next = npos;
    s.prev = splitter_tail_;
    if (splitter_tail_ != npos) bbs_[splitter_tail_].next = x;
    else splitter_head_ = x;
    splitter_tail_ = x;
}

void Engine::splitter_insert_after(index_t x, index_t after) {
    Bbs& s = bbs_[x];
    s.stable = false;
    s.prev = after;
    s.next = bbs_[after].next;
    if (s.next != npos) bbs_[s.next].prev = x;
    else splitter_tail_ = x;
    bbs_[after].next = x;
}

void Engine::make_stable(index_t x) {
    list_unlink(x);
    Bbs& s = bbs_[x];
    s.marked_end = s.begin;
    s.primary = false;
    stable_push(x, s.block);
}

void Engine::make_unstable_back(index_t x, bool primary) {
    list_unlink(x);
    bbs_[x].primary = primary;
    splitter_push_back(x);
}

// ---------------------------------------------------------------- arrays

void Engine::swap_states(index_t i, index_t j) {
    std::swap(order_[i], order_[j]);
    pos_[order_[i]] = i;
    pos_[order_[j]] = j;
}

void Engine::swap_ba(index_t i, index_t j) {
    std::swap(ba_[i], ba_[j]);
    ba_pos_[ba_[i]] = i;
    ba_pos_[ba_[j]] = j;
}

void Engine::swap_bb(index_t i, index_t j) {
    std::swap(bb_[i], bb_[j]);
    bb_pos_[bb_[i]] = i;
    bb_pos_[bb_[j]] = j;
}

void Engine::swap_out(index_t i, index_t j) {
    std::swap(out_[i], out_[j]);
    out_pos_[out_[i]] = i;
    out_pos_[out_[j]] = j;
}

void Engine::swap_in(index_t i, index_t j) {
    std::swap(in_[i], in_[j]);
    in_pos_[in_[i]] = i;
    in_pos_[in_[j]] = j;
}

// The child occupies the positions right behind the parent. Marked
// transitions stay a prefix of both.
void Engine::bbs_move_to_child(index_t t, index_t parent, index_t child) {
    Bbs& P = bbs_[parent];
    Bbs& C = bbs_[child];
    index_t p = bb_pos_[t];
    bool marked = p < P.marked_end;
    if (marked) {
        swap_bb(p, P.marked_end - 1);
        swap_bb(P.marked_end - 1, P.end - 1);
        --P.marked_end;
    } else {
        swap_bb(p, P.end - 1);
    }
    --P.end;
    --C.begin;
    if (!marked) {
        swap_bb(C.begin, C.marked_end - 1);
        --C.marked_end;
    }
    bbs_of_[t] = child;
}

index_t Engine::new_abs(index_t begin, index_t bunch, index_t action, index_t target_block) {
    Abs a{begin, begin, bunch, action, target_block};
    if (!free_abs_.empty()) {
        index_t x = free_abs_.back();
        free_abs_.pop_back();
        abs_[x] = a;
        return x;
    }
    abs_.push_back(a);
    return static_cast<index_t>(abs_.size() - 1);
}

index_t Engine::new_bbs(index_t begin, index_t bunch, index_t block) {
    Bbs s;
    s.begin = s.marked_end = s.end = begin;
    s.bunch = bunch;
    s.block = block;
    if (!free_bbs_.empty()) {
        index_t x = free_bbs_.back();
        free_bbs_.pop_back();
        bbs_[x] = s;
        return x;
    }
    bbs_.push_back(s);
    return static_cast<index_t>(bbs_.size() - 1);
}

index_t Engine::new_group(index_t begin) {
    Group g{begin, begin};
    if (!free_groups_.empty()) {
        index_t x = free_groups_.back();
        free_groups_.pop_back();
        groups_[x] = g;
        return x;
    }
    groups_.push_back(g);
    return static_cast<index_t>(groups_.size() - 1);
}

index_t Engine::new_bunch() {
    bunches_.push_back({ni_a_, ni_a_});
    return static_cast<index_t>(bunches_.size() - 1);
}

void Engine::note_bunch_maybe_nontrivial(index_t b) {
    if (!bunches_[b].on_stack && !bunch_trivial(b)) {
        bunches_[b].on_stack = true;
        nontrivial_.push_back(b);
    }
}

void Engine::mark(index_t t) {
    index_t x = bbs_of_[t];
    assert(x != npos && !bbs_[x].stable);
    Bbs& s = bbs_[x];
    index_t p = bb_pos_[t];
    if (p < s.marked_end) return;
    swap_bb(p, s.marked_end);
    ++s.marked_end;
}

// ---------------------------------------------------------------- bunch split

index_t Engine::split_bunch(index_t tb) {
    assert(!bunch_trivial(tb));
    const index_t size = bunches_[tb].end - bunches_[tb].begin;
    index_t first = abs_of_[ba_[bunches_[tb].begin]];
    index_t last = abs_of_[ba_[bunches_[tb].end - 1]];
    bool take_first = 2 * (abs_[first].end - abs_[first].begin) <= size;
    index_t a = take_first ? first : last;
    assert(take_first || 2 * (abs_[last].end - abs_[last].begin) <= size);

    index_t nb = static_cast<index_t>(bunches_.size());
    bunches_.push_back({abs_[a].begin, abs_[a].end});
    if (take_first) bunches_[tb].begin = abs_[a].end;
    else bunches_[tb].end = abs_[a].begin;
    abs_[a].bunch = nb;
    work_.bunch_units += abs_[a].end - abs_[a].begin;

    const std::uint64_t st = ++stamp_;
    std::vector<index_t> touched_bbs, touched_groups;
    for (index_t p = abs_[a].begin; p < abs_[a].end; ++p) {
        index_t t = ba_[p];
        index_t x = bbs_of_[t];
        if (bbs_[x].stamp != st) {
            index_t c = new_bbs(bbs_[x].end, nb, bbs_[x].block);
            bbs_[x].stamp = st;
            bbs_[x].child = c;
            touched_bbs.push_back(x);
        }
        bbs_move_to_child(t, x, bbs_[x].child);

        index_t g = og_[t];
        if (groups_[g].stamp != st) {
            index_t c = new_group(groups_[g].end);
            groups_[g].stamp = st;
            groups_[g].child = c;
            touched_groups.push_back(g);
        }
        Group& G = groups_[g];
        Group& C = groups_[G.child];
        swap_out(out_pos_[t], G.end - 1);
        --G.end;
        --C.begin;
        og_[t] = G.child;
    }

    for (index_t x : touched_bbs) {
        index_t c = bbs_[x].child;
        if (bbs_[x].begin == bbs_[x].end) {
            // all transitions of the block moved: not splittable, X takes over
            Bbs& X = bbs_[x];
            X.begin = bbs_[c].begin;
            X.end = bbs_[c].end;
            X.marked_end = X.begin;
            X.bunch = nb;
            for (index_t p = X.begin; p < X.end; ++p) bbs_of_[bb_[p]] = x;
            free_bbs_.push_back(c);
        } else {
            list_unlink(x);
            bbs_[x].stable = false;
            bbs_[c].marked_end = bbs_[c].end;
            bbs_[c].primary = true;
            bbs_[x].primary = false;
            splitter_push_back(c);
            splitter_push_back(x);
        }
        bbs_[x].child = npos;
    }
    for (index_t g : touched_groups) {
        index_t c = groups_[g].child;
        if (groups_[g].begin == groups_[g].end) {
            groups_[g].begin = groups_[c].begin;
            groups_[g].end = groups_[c].end;
            for (index_t p = groups_[g].begin; p < groups_[g].end; ++p) og_[out_[p]] = g;
            free_groups_.push_back(c);
        } else {
            // source has transitions in both bunches: mark one in the remainder
            mark(out_[groups_[g].begin]);
            ++work_.bunch_units;
        }
        groups_[g].child = npos;
    }

    if (trace_) {
        TraceEvent ev;
        ev.kind = TraceEvent::Kind::BunchSplit;
        ev.action = abs_[a].action;
        ev.target_block = abs_[a].target_block;
        ev.transitions = bunch_transitions(nb);
        trace_(ev);
    }
    return nb;
}

// ---------------------------------------------------------------- block split

Engine::BlockSplitResult Engine::split_block(index_t b, const SplitOutcome& o) {
    const index_t u_size = o.u_size(), r_size = o.r_size();
    assert(u_size > 0 && r_size > 0);
    const bool move_u = u_size <= r_size;
    const index_t nb = static_cast<index_t>(blocks_.size());
    blocks_.push_back({});
    Block u_blk{o.begin, o.u_bottom_end, o.u_end};
    Block r_blk{o.u_end, o.r_bottom_end, o.end};
    u_blk.stable_head = r_blk.stable_head = npos;
    index_t old_head = blocks_[b].stable_head;
    if (move_u) {
        blocks_[nb] = u_blk;
        blocks_[b] = r_blk;
    } else {
        blocks_[nb] = r_blk;
        blocks_[b] = u_blk;
    }
    blocks_[b].stable_head = old_head;
    BlockSplitResult res;
    res.r_block = move_u ? b : nb;
    res.u_block = move_u ? nb : b;

    const index_t mb = blocks_[nb].begin, me = blocks_[nb].end;
    for (index_t p = mb; p < me; ++p) block_of_[order_[p]] = nb;
    work_.smaller_block_units += me - mb;

    const std::uint64_t st = ++stamp_;
    std::vector<index_t> touched_abs, touched_bbs;
    for (index_t p = mb; p < me; ++p) {
        index_t s = order_[p];
        for (index_t q = in_inert_end_[s]; q < in_end_[s]; ++q) {
            index_t t = in_[q];
            index_t a = abs_of_[t];
            if (abs_[a].stamp != st) {
                index_t c = new_abs(abs_[a].end, abs_[a].bunch, abs_[a].action, nb);
                abs_[a].stamp = st;
                abs_[a].child = c;
                touched_abs.push_back(a);
            }
            Abs& A = abs_[a];
            Abs& C = abs_[A.child];
            swap_ba(ba_pos_[t], A.end - 1);
            --A.end;
            --C.begin;
            abs_of_[t] = A.child;
        }
        for (index_t q = out_begin_[s]; q < out_inert_[s]; ++q) {
            index_t t = out_[q];
            index_t x = bbs_of_[t];
            if (bbs_[x].stamp != st) {
                index_t c = new_bbs(bbs_[x].end, bbs_[x].bunch, nb);
                bbs_[x].stamp = st;
                bbs_[x].child = c;
                touched_bbs.push_back(x);
            }
            bbs_move_to_child(t, x, bbs_[x].child);
        }
        work_.smaller_block_units += (in_end_[s] - in_inert_end_[s]) + (out_inert_[s] - out_begin_[s]);
    }

    for (index_t a : touched_abs) {
        index_t c = abs_[a].child;
        if (abs_[a].begin == abs_[a].end) {
            abs_[a].begin = abs_[c].begin;
            abs_[a].end = abs_[c].end;
            abs_[a].target_block = nb;
            for (index_t p = abs_[a].begin; p < abs_[a].end; ++p) abs_of_[ba_[p]] = a;
            abs_[a].child = npos;
            free_abs_.push_back(c);
        } else {
            note_bunch_maybe_nontrivial(abs_[a].bunch);
        }
    }
    for (index_t x : touched_bbs) {
        index_t c = bbs_[x].child;
        if (bbs_[x].begin == bbs_[x].end) {
            Bbs& X = bbs_[x];
            X.begin = bbs_[c].begin;
            X.end = bbs_[c].end;
            X.marked_end = bbs_[c].marked_end;
            for (index_t p = X.begin; p < X.end; ++p) bbs_of_[bb_[p]] = x;
            free_bbs_.push_back(c);
            X.child = npos;
            if (X.stable) {
                list_unlink(x);
                X.block = nb;
                stable_push(x, nb);
            } else {
                X.block = nb;
            }
        } else {
            bbs_[c].primary = bbs_[x].primary;
            if (bbs_[x].stable) stable_push(c, nb);
            else if (bbs_[x].prev != npos || bbs_[x].next != npos || splitter_head_ == x)
                splitter_insert_after(c, x);
            else
                bbs_[c].stable = false;  // detached slice being used as splitter
        }
    }
    last_split_stamp_ = st;

    // τ-transitions between the halves are no longer inert.
    if (move_u) {
        for (index_t p = mb; p < me; ++p) {
            index_t s = order_[p];
            for (index_t q = in_begin_[s]; q < in_inert_end_[s]; ++q) {
                index_t t = in_[q];
                if (block_of_[src_[t]] != nb) res.newly_noninert.push_back(t);
            }
            work_.smaller_block_units += in_inert_end_[s] - in_begin_[s];
        }
    } else {
        for (index_t p = mb; p < me; ++p) {
            index_t s = order_[p];
            for (index_t q = out_inert_[s]; q < out_end_[s]; ++q) {
                index_t t = out_[q];
                if (block_of_[tgt_[t]] != nb) res.newly_noninert.push_back(t);
            }
            work_.smaller_block_units += out_end_[s] - out_inert_[s];
        }
    }
    return res;
}

index_t Engine::part_in_block(index_t x, index_t block) const {
    if (bbs_[x].block == block) return x;
    if (bbs_[x].stamp == last_split_stamp_ && bbs_[x].child != npos && bbs_[bbs_[x].child].block == block)
        return bbs_[x].child;
    return npos;
}

std::vector<index_t> Engine::make_noninert(const std::vector<index_t>& ts, index_t bunch) {
    std::vector<index_t> new_bottoms;
    if (ts.empty()) return new_bottoms;
    assert(bunches_[bunch].end == ni_a_);
    const index_t tb = block_of_[tgt_[ts[0]]];
    const index_t sb = block_of_[src_[ts[0]]];

    index_t a = npos;
    if (bunches_[bunch].end > bunches_[bunch].begin) {
        index_t last = abs_of_[ba_[ni_a_ - 1]];
        if (abs_[last].target_block == tb) a = last;
    }
    if (a == npos) a = new_abs(ni_a_, bunch, tau_, tb);
    index_t x = npos;
    if (ni_b_ > 0) {
        index_t last = bbs_of_[bb_[ni_b_ - 1]];
        if (bbs_[last].bunch == bunch && bbs_[last].block == sb) x = last;
    }
    if (x == npos) {
        x = new_bbs(ni_b_, bunch, sb);
        stable_push(x, sb);
    }

    const std::uint64_t st = ++stamp_;
    std::vector<index_t> sources;
    for (index_t t : ts) {
        assert(act_[t] == tau_ && block_of_[tgt_[t]] == tb && block_of_[src_[t]] == sb);
        swap_ba(ba_pos_[t], ni_a_);
        ++ni_a_;
        abs_[a].end = ni_a_;
        bunches_[bunch].end = ni_a_;
        abs_of_[t] = a;

        swap_bb(bb_pos_[t], ni_b_);
        ++ni_b_;
        bbs_[x].end = ni_b_;
        bbs_of_[t] = x;

        index_t s = src_[t];
        swap_out(out_pos_[t], out_inert_[s]);
        index_t q = out_inert_[s]++;
        index_t g = npos;
        if (q > out_begin_[s]) {
            index_t prev = out_[q - 1];
            if (bunch_of(prev) == bunch) g = og_[prev];
        }
        if (g == npos) g = new_group(q);
        assert(groups_[g].end == q);
        groups_[g].end = q + 1;
        og_[t] = g;

        index_t u = tgt_[t];
        swap_in(in_pos_[t], in_inert_end_[u] - 1);
        --in_inert_end_[u];

        if (state_stamp_[s] != st) {
            state_stamp_[s] = st;
            sources.push_back(s);
        }
    }
    for (index_t s : sources) {
        if (out_inert_[s] != out_end_[s]) continue;
        Block& B = blocks_[block_of_[s]];
        swap_states(pos_[s], B.bottom_end);
        ++B.bottom_end;
        new_bottoms.push_back(s);
        work_.new_bottom_units += out_end_[s] - out_begin_[s];
        if (trace_) {
            TraceEvent ev;
            ev.kind = TraceEvent::Kind::NewBottom;
            ev.block = block_of_[s];
            ev.state = s;
            trace_(ev);
        }
    }
    note_bunch_maybe_nontrivial(bunch);
    return new_bottoms;
}

void Engine::register_new_bottom(index_t block, index_t skip1, index_t skip2) {
    std::vector<index_t> slices;
    for (index_t x = blocks_[block].stable_head; x != npos; x = bbs_[x].next) slices.push_back(x);
    for (index_t x : slices) {
        ++work_.new_bottom_units;
        if (x == skip1 || x == skip2) continue;
        make_unstable_back(x, false);
    }
    const Block& B = blocks_[block];
    for (index_t p = B.begin; p < B.bottom_end; ++p) {
        index_t s = order_[p];
        for (index_t q = out_begin_[s]; q < out_inert_[s];) {
            const Group& g = groups_[og_[out_[q]]];
            index_t t = out_[g.begin];
            if (!bbs_[bbs_of_[t]].stable) mark(t);
            ++work_.new_bottom_units;
            q = g.end;
        }
    }
}

// ---------------------------------------------------------------- main loop

void Engine::run() {
    validate_checkpoint("initial");
    while (!nontrivial_.empty()) {
        index_t tb = nontrivial_.back();
        if (bunch_trivial(tb)) {
            bunches_[tb].on_stack = false;
            nontrivial_.pop_back();
            continue;
        }
        validate_checkpoint("loop head");
        split_bunch(tb);
        stabilize();
    }
    validate_checkpoint("final");
}

void Engine::stabilize() {
    while (splitter_head_ != npos) {
        const index_t x = splitter_head_;
        const index_t b = bbs_[x].block;
        const bool primary = bbs_[x].primary;
        index_t partner_bunch = npos;
        if (primary) {
            index_t p = bbs_[x].next;
            assert(p != npos && bbs_[p].block == b && !bbs_[p].primary);
            partner_bunch = bbs_[p].bunch;
        }

        SplitOutcome o = split(b, x);
        if (o.u_empty) {
            make_stable(x);
            continue;
        }
        BlockSplitResult res = split_block(b, o);
        assert(bbs_[x].block == res.r_block);
        make_stable(x);

        if (primary) {
            bool found = false;
            index_t cand = splitter_head_;
            for (int k = 0; k < 2 && cand != npos && !found; ++k, cand = bbs_[cand].next)
                if (bbs_[cand].bunch == partner_bunch && bbs_[cand].block == res.u_block) {
                    make_stable(cand);
                    found = true;
                }
            assert(found);
            if (!found) violations_.push_back("remainder slice of U not found in first two splitter positions");
        }

        if (res.newly_noninert.empty()) continue;

        index_t tb = new_bunch();
        if (trace_) {
            TraceEvent ev;
            ev.kind = TraceEvent::Kind::NewBunch;
            ev.block = res.r_block;
            ev.transitions = res.newly_noninert;
            trace_(ev);
        }
        make_noninert(res.newly_noninert, tb);
        if (validate_)
            for (index_t s : o.new_bottom_candidates)
                if (out_inert_[s] != out_end_[s])
                    violations_.push_back("split: candidate " + std::to_string(s) + " kept an inert transition");
        const index_t z = bbs_of_[res.newly_noninert[0]];
        list_unlink(z);
        bbs_[z].stable = false;
        bbs_[z].marked_end = bbs_[z].end;

        const index_t rb = res.r_block;
        SplitOutcome o2 = split(rb, z);
        index_t n_block = rb;
        std::vector<index_t> second_bottoms;
        index_t tprime_n = x;
        if (!o2.u_empty) {
            BlockSplitResult res2 = split_block(rb, o2);
            n_block = res2.r_block;
            tprime_n = part_in_block(x, n_block);
            bbs_[z].marked_end = bbs_[z].begin;
            bbs_[z].primary = false;
            stable_push(z, bbs_[z].block);
            second_bottoms = make_noninert(res2.newly_noninert, tb);
        } else {
            bbs_[z].marked_end = bbs_[z].begin;
            stable_push(z, bbs_[z].block);
        }
        register_new_bottom(n_block, z, second_bottoms.empty() ? tprime_n : npos);
    }
}

}  // namespace branchmin

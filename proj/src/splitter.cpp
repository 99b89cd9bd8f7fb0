#include <algorithm>
#include <cassert>

#include "branchmin/engine.hpp"

namespace branchmin {

namespace {

enum class Step { Progress, Finished, Aborted };

}  // namespace

// Zones of the state slice of B while the coroutines run:
//   [begin, rb)   U bottom        [rb, bend)   R bottom
//   [bend, unb)   U non-bottom    [unb, ut)    untested > 0
//   [ut, rnb)     untested undefined           [rnb, end)   R non-bottom
SplitOutcome Engine::split(index_t b, index_t x) {
    const index_t begin = blocks_[b].begin, bend = blocks_[b].bottom_end, end = blocks_[b].end;
    const index_t size = end - begin;
    const Bbs& T = bbs_[x];
    assert(T.block == b);

    if (validate_) {
        // Bottom states with a transition in T must have a marked one.
        const std::uint64_t st = ++stamp_;
        for (index_t p = T.begin; p < T.marked_end; ++p) state_stamp_[src_[bb_[p]]] = st;
        for (index_t p = T.marked_end; p < T.end; ++p) {
            index_t s = src_[bb_[p]];
            if (pos_[s] < bend && state_stamp_[s] != st)
                violations_.push_back("marking: bottom state " + std::to_string(s) +
                                      " has an unmarked splitter transition only");
        }
    }

    index_t rb = bend, rnb = end;
    for (index_t p = T.begin; p < T.marked_end; ++p) {
        index_t s = src_[bb_[p]];
        index_t q = pos_[s];
        if (q < bend) {
            if (q < rb) swap_states(q, --rb);
        } else if (q < rnb) {
            swap_states(q, --rnb);
        }
    }
    const index_t marked = T.marked_end - T.begin;
    work_.smaller_block_units += marked;
    index_t unb = bend, ut = bend;

    SplitOutcome o;
    o.begin = begin;
    o.end = end;
    if (rb == begin) {
        o.u_empty = true;
        o.finished = SplitOutcome::Side::U;
        o.u_bottom_end = o.u_end = begin;
        o.r_bottom_end = bend;
        if (trace_) {
            TraceEvent ev;
            ev.kind = TraceEvent::Kind::BlockSplit;
            ev.block = b;
            ev.primary = T.primary;
            ev.r = block_states(b);
            trace_(ev);
        }
        return o;
    }

    auto u_size = [&] { return (rb - begin) + (unb - bend); };
    auto r_size = [&] { return (bend - rb) + (end - rnb); };
    auto in_r = [&](index_t s) {
        index_t q = pos_[s];
        return q >= rnb || (q >= rb && q < bend);
    };
    auto add_to_r = [&](index_t s) {
        index_t q = pos_[s];
        assert(q >= unb && q < rnb);
        if (q < ut) {
            swap_states(q, ut - 1);
            q = --ut;
        }
        swap_states(q, --rnb);
    };
    auto add_to_u = [&](index_t s) {
        assert(pos_[s] >= unb && pos_[s] < ut);
        swap_states(pos_[s], unb++);
    };

    bool r_sources_done = false;
    const index_t t_unmarked_begin = T.marked_end, t_end = T.end;

    // U-coroutine
    enum class UPhase { Next, Preds, Slow } uph = UPhase::Next;
    index_t u_cur = begin;
    bool u_nonbottom = false;
    index_t u_in = 0, u_in_end = 0, u_t = npos, u_sl = 0, u_sl_end = 0;
    std::uint64_t u_steps = 0;
    auto u_step = [&]() -> Step {
        for (;;) switch (uph) {
                case UPhase::Next: {
                    if (!u_nonbottom && u_cur == rb) {
                        u_nonbottom = true;
                        u_cur = bend;
                    }
                    if (u_nonbottom && u_cur == unb) return Step::Finished;
                    index_t s = order_[u_cur++];
                    u_in = in_begin_[s];
                    u_in_end = in_inert_end_[s];
                    uph = UPhase::Preds;
                    ++u_steps;
                    return Step::Progress;
                }
                case UPhase::Preds: {
                    if (u_in == u_in_end) {
                        uph = UPhase::Next;
                        continue;
                    }
                    index_t t = src_[in_[u_in++]];
                    ++u_steps;
                    if (pos_[t] >= rnb) return Step::Progress;
                    if (pos_[t] >= ut) {
                        untested_[t] = out_end_[t] - out_inert_[t];
                        swap_states(pos_[t], ut++);
                    }
                    if (--untested_[t] > 0) return Step::Progress;
                    if (!r_sources_done) {
                        u_t = t;
                        u_sl = out_begin_[t];
                        u_sl_end = out_inert_[t];
                        uph = UPhase::Slow;
                        return Step::Progress;
                    }
                    add_to_u(t);
                    return 2 * u_size() > size ? Step::Aborted : Step::Progress;
                }
                case UPhase::Slow: {
                    if (pos_[u_t] >= rnb) {
                        uph = UPhase::Preds;
                        continue;
                    }
                    if (r_sources_done || u_sl == u_sl_end) {
                        add_to_u(u_t);
                        uph = UPhase::Preds;
                        ++u_steps;
                        return 2 * u_size() > size ? Step::Aborted : Step::Progress;
                    }
                    index_t tr = out_[u_sl++];
                    ++u_steps;
                    if (bbs_of_[tr] == x) {
                        o.new_bottom_candidates.push_back(u_t);
                        uph = UPhase::Preds;
                    }
                    return Step::Progress;
                }
            }
    };

    // R-coroutine
    enum class RPhase { Sources, Next, Preds } rph = RPhase::Sources;
    index_t r_src = t_unmarked_begin;
    index_t r_cur_bottom = rb, r_cur_nb = end;
    index_t r_in = 0, r_in_end = 0;
    std::uint64_t r_steps = 0;
    auto r_step = [&]() -> Step {
        for (;;) switch (rph) {
                case RPhase::Sources: {
                    if (r_src == t_end) {
                        r_sources_done = true;
                        rph = RPhase::Next;
                        continue;
                    }
                    index_t s = src_[bb_[r_src++]];
                    ++r_steps;
                    if (!in_r(s)) {
                        if (pos_[s] < bend) {
                            // unmarked bottom source: marking precondition broken
                            violations_.push_back("split: unmarked bottom source " + std::to_string(s));
                            return Step::Progress;
                        }
                        add_to_r(s);
                        if (2 * r_size() > size) return Step::Aborted;
                    }
                    return Step::Progress;
                }
                case RPhase::Next: {
                    index_t s;
                    if (r_cur_bottom < bend) s = order_[r_cur_bottom++];
                    else if (r_cur_nb > rnb) s = order_[--r_cur_nb];
                    else return Step::Finished;
                    r_in = in_begin_[s];
                    r_in_end = in_inert_end_[s];
                    rph = RPhase::Preds;
                    ++r_steps;
                    return Step::Progress;
                }
                case RPhase::Preds: {
                    if (r_in == r_in_end) {
                        rph = RPhase::Next;
                        continue;
                    }
                    index_t t = src_[in_[r_in++]];
                    ++r_steps;
                    if (!in_r(t)) {
                        add_to_r(t);
                        if (2 * r_size() > size) return Step::Aborted;
                    }
                    return Step::Progress;
                }
            }
    };

    bool u_dead = 2 * u_size() > size, r_dead = 2 * r_size() > size;
    SplitOutcome::Side winner;
    for (;;) {
        if (!u_dead) {
            Step s = u_step();
            if (s == Step::Finished) {
                winner = SplitOutcome::Side::U;
                break;
            }
            if (s == Step::Aborted) u_dead = true;
        }
        if (!r_dead) {
            Step s = r_step();
            if (s == Step::Finished) {
                winner = SplitOutcome::Side::R;
                break;
            }
            if (s == Step::Aborted) r_dead = true;
        }
        assert(!(u_dead && r_dead));
    }
    o.finished = winner;
    o.u_steps = u_steps;
    o.r_steps = r_steps;
    o.u_aborted = u_dead;
    o.r_aborted = r_dead;
    work_.smaller_block_units += u_steps + r_steps;

    // Bring R's bottom states behind U's non-bottom states.
    const index_t u_nb_end = winner == SplitOutcome::Side::U ? unb : rnb;
    const index_t xa = bend - rb, yc = u_nb_end - bend;
    if (xa <= yc) {
        for (index_t i = 0; i < xa; ++i) swap_states(rb + i, u_nb_end - xa + i);
    } else {
        for (index_t i = 0; i < yc; ++i) swap_states(rb + i, bend + i);
    }
    work_.smaller_block_units += std::min(xa, yc);
    o.u_bottom_end = rb;
    o.u_end = rb + yc;
    o.r_bottom_end = o.u_end + xa;

    if (validate_) validate_split(b, x, o);
    if (trace_) {
        TraceEvent ev;
        ev.kind = TraceEvent::Kind::BlockSplit;
        ev.block = b;
        ev.primary = T.primary;
        ev.u.assign(order_.begin() + o.begin, order_.begin() + o.u_end);
        ev.r.assign(order_.begin() + o.u_end, order_.begin() + o.end);
        trace_(ev);
    }
    return o;
}

void Engine::validate_split(index_t b, index_t x, const SplitOutcome& o) {
    // Reference: backward closure over inert transitions from the sources of T.
    const std::uint64_t st = ++stamp_;
    std::vector<index_t> stack;
    const Bbs& T = bbs_[x];
    for (index_t p = T.begin; p < T.end; ++p) {
        index_t s = src_[bb_[p]];
        if (state_stamp_[s] != st) {
            state_stamp_[s] = st;
            stack.push_back(s);
        }
    }
    std::size_t count = 0;
    while (!stack.empty()) {
        index_t s = stack.back();
        stack.pop_back();
        ++count;
        for (index_t q = in_begin_[s]; q < in_inert_end_[s]; ++q) {
            index_t t = src_[in_[q]];
            if (block_of_[t] == b && state_stamp_[t] != st) {
                state_stamp_[t] = st;
                stack.push_back(t);
            }
        }
    }
    bool ok = count == o.r_size();
    for (index_t p = o.u_end; p < o.end && ok; ++p) ok = state_stamp_[order_[p]] == st;
    if (!ok) violations_.push_back("split: result differs from reference closure in block " + std::to_string(b));
    for (index_t p = o.begin; p < o.u_end; ++p) {
        index_t s = order_[p];
        bool bottom = p < o.u_bottom_end;
        if (bottom != (out_inert_[s] == out_end_[s])) violations_.push_back("split: U bottom zone mismatch");
        for (index_t q = out_inert_[s]; q < out_end_[s]; ++q)
            if (state_stamp_[tgt_[out_[q]]] == st) violations_.push_back("split: inert transition from U to R");
    }
    std::uint64_t lo = std::min(o.u_steps, o.r_steps), hi = std::max(o.u_steps, o.r_steps);
    if (!o.u_aborted && !o.r_aborted && hi > lo + 1)
        violations_.push_back("split: coroutines out of lockstep");
    if (o.u_aborted && o.u_steps > o.r_steps + 1) violations_.push_back("split: aborted U ran ahead");
    if (o.r_aborted && o.r_steps > o.u_steps + 1) violations_.push_back("split: aborted R ran ahead");
}

}  // namespace branchmin

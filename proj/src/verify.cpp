#include "branchmin/verify.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <tuple>

namespace branchmin {

Partition oracle_minimize(const Lts& lts) {
    const index_t n = lts.n;
    std::vector<std::vector<std::pair<index_t, index_t>>> out(n);  // (label or npos for τ, tgt)
    for (const auto& t : lts.transitions)
        out[t.src].push_back({lts.actions.is_internal(t.label) ? npos : t.label, t.tgt});

    std::vector<index_t> block(n, 0);
    index_t count = 1;
    std::vector<char> seen(n, 0);
    std::vector<index_t> stack, visited;
    for (;;) {
        std::map<std::pair<index_t, std::vector<std::pair<index_t, index_t>>>, index_t> ids;
        std::vector<index_t> next(n);
        for (index_t s = 0; s < n; ++s) {
            std::vector<std::pair<index_t, index_t>> sig;
            stack.assign(1, s);
            visited.assign(1, s);
            seen[s] = 1;
            while (!stack.empty()) {
                index_t r = stack.back();
                stack.pop_back();
                for (auto [l, u] : out[r]) {
                    if (l == npos && block[u] == block[s]) {
                        if (!seen[u]) {
                            seen[u] = 1;
                            visited.push_back(u);
                            stack.push_back(u);
                        }
                        continue;
                    }
                    sig.push_back({l, block[u]});
                }
            }
            for (index_t v : visited) seen[v] = 0;
            std::sort(sig.begin(), sig.end());
            sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
            auto [it, fresh] = ids.try_emplace({block[s], std::move(sig)}, static_cast<index_t>(ids.size()));
            next[s] = it->second;
        }
        index_t next_count = static_cast<index_t>(ids.size());
        block = std::move(next);
        if (next_count == count) break;
        count = next_count;
    }
    Partition p;
    p.block_of = std::move(block);
    p.block_count = count;
    return canonical(p);
}

namespace {

std::string visible_name(index_t i) {
    if (i < 26) return std::string(1, static_cast<char>('a' + i));
    return "l" + std::to_string(i);
}

}  // namespace

Lts gen_random(const GenConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    auto uniform = [&](index_t lo, index_t hi) { return std::uniform_int_distribution<index_t>(lo, hi)(rng); };
    index_t n = cfg.exact_size ? std::max<index_t>(cfg.n_max, 1) : uniform(1, std::max<index_t>(cfg.n_max, 1));
    if (n - 1 > cfg.m_max) n = cfg.m_max + 1;
    index_t m = cfg.exact_size ? cfg.m_max : uniform(n - 1, cfg.m_max);

    Lts l;
    l.n = n;
    l.initial = 0;
    const index_t visible = cfg.label_count > 1 ? cfg.label_count - 1 : 0;
    l.actions.intern("tau", true);
    for (index_t i = 0; i < visible; ++i) l.actions.intern(visible_name(i), false);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    auto label = [&]() -> index_t {
        if (visible == 0 || coin(rng) < cfg.tau_fraction) return 0;
        return uniform(1, visible);
    };
    l.transitions.reserve(m);
    for (index_t i = 1; i < n; ++i) {
        index_t parent = uniform(0, i - 1);
        l.transitions.push_back({parent, label(), i});
    }
    for (index_t j = n - 1; j < m; ++j) {
        index_t s = uniform(0, n - 1), t = uniform(0, n - 1);
        l.transitions.push_back({s, label(), t});
    }
    normalize(l);
    return l;
}

Lts gen_appendix_a(index_t k) {
    Lts l;
    l.n = 2;
    l.initial = 1;
    index_t tau = l.actions.intern("tau", true);
    index_t a0 = l.actions.intern("a0", false);
    l.transitions.push_back({1, tau, 0});
    l.transitions.push_back({1, a0, 1});
    for (index_t i = 1; i <= k; ++i) {
        index_t a = l.actions.intern("a" + std::to_string(i), false);
        l.transitions.push_back({1, a, 0});
        l.transitions.push_back({0, a, 0});
    }
    normalize(l);
    return l;
}

Lts gen_tau_cycle(index_t n) {
    Lts l;
    l.n = std::max<index_t>(n, 1);
    index_t tau = l.actions.intern("tau", true);
    for (index_t i = 0; i < n; ++i) l.transitions.push_back({i, tau, (i + 1) % n});
    normalize(l);
    return l;
}

// ---------------------------------------------------------------- validator

std::vector<std::string> validate_engine(const Engine& e) {
    std::vector<std::string> v;
    auto fail = [&](const std::string& msg) {
        if (v.size() < 64) v.push_back(msg);
    };
    const index_t n = e.n_, m = e.m_;
    auto tn = [](index_t t) { return " (transition " + std::to_string(t) + ")"; };

    // states and blocks
    if (e.order_.size() != n || e.pos_.size() != n || e.block_of_.size() != n) {
        fail("state arrays have wrong size");
        return v;
    }
    for (index_t i = 0; i < n; ++i)
        if (e.order_[i] >= n || e.pos_[e.order_[i]] != i) fail("state order/pos not inverse at " + std::to_string(i));
    std::vector<std::tuple<index_t, index_t, index_t>> ranges;
    for (index_t b = 0; b < e.blocks_.size(); ++b) {
        const auto& B = e.blocks_[b];
        if (!(B.begin <= B.bottom_end && B.bottom_end <= B.end && B.begin < B.end))
            fail("block " + std::to_string(b) + " has bad bounds");
        ranges.emplace_back(B.begin, B.end, b);
    }
    std::sort(ranges.begin(), ranges.end());
    index_t cover = 0;
    for (auto [bg, en, b] : ranges) {
        if (bg != cover) fail("block slices do not tile the state array near " + std::to_string(bg));
        cover = en;
        for (index_t p = bg; p < en && p < n; ++p)
            if (e.block_of_[e.order_[p]] != b)
                fail("block_of of state " + std::to_string(e.order_[p]) + " disagrees with block " + std::to_string(b));
    }
    if (cover != n) fail("block slices do not cover all states");
    if (!v.empty()) return v;

    const index_t tau = e.tau_;
    std::vector<char> inert(m, 0);
    std::vector<index_t> inert_out(n, 0);
    index_t ni = 0;
    for (index_t t = 0; t < m; ++t) {
        inert[t] = e.act_[t] == tau && e.block_of_[e.src_[t]] == e.block_of_[e.tgt_[t]];
        if (inert[t]) ++inert_out[e.src_[t]];
        else ++ni;
    }
    for (index_t b = 0; b < e.blocks_.size(); ++b) {
        const auto& B = e.blocks_[b];
        for (index_t p = B.begin; p < B.end; ++p) {
            bool bottom = inert_out[e.order_[p]] == 0;
            if (bottom != (p < B.bottom_end))
                fail("state " + std::to_string(e.order_[p]) + " is in the wrong bottom zone");
        }
    }

    // the four transition orderings
    auto perm = [&](const std::vector<index_t>& arr, const std::vector<index_t>& pos, const char* name) {
        if (arr.size() != m || pos.size() != m) {
            fail(std::string(name) + " has wrong size");
            return false;
        }
        for (index_t i = 0; i < m; ++i)
            if (arr[i] >= m || pos[arr[i]] != i) {
                fail(std::string(name) + " not inverse at " + std::to_string(i));
                return false;
            }
        return true;
    };
    if (!perm(e.ba_, e.ba_pos_, "bunch order") || !perm(e.bb_, e.bb_pos_, "slice order") ||
        !perm(e.out_, e.out_pos_, "source order") || !perm(e.in_, e.in_pos_, "target order"))
        return v;
    if (e.ni_a_ != ni || e.ni_b_ != ni) fail("non-inert boundary of bunch or slice order is off");
    for (index_t p = 0; p < m; ++p) {
        if ((p < e.ni_a_) == static_cast<bool>(inert[e.ba_[p]])) fail("inertness misplaced in bunch order" + tn(e.ba_[p]));
        if ((p < e.ni_b_) == static_cast<bool>(inert[e.bb_[p]])) fail("inertness misplaced in slice order" + tn(e.bb_[p]));
    }
    if (!v.empty()) return v;

    // per source, with bunch groups
    index_t total_out = 0, total_in = 0;
    std::vector<index_t> bunch_stamp(e.bunches_.size(), npos);
    for (index_t s = 0; s < n; ++s) {
        if (!(e.out_begin_[s] <= e.out_inert_[s] && e.out_inert_[s] <= e.out_end_[s] && e.out_end_[s] <= m)) {
            fail("bad outgoing bounds of state " + std::to_string(s));
            continue;
        }
        total_out += e.out_end_[s] - e.out_begin_[s];
        for (index_t p = e.out_begin_[s]; p < e.out_end_[s]; ++p) {
            index_t t = e.out_[p];
            if (e.src_[t] != s) fail("outgoing list of " + std::to_string(s) + " holds a foreign transition");
            if ((p < e.out_inert_[s]) == static_cast<bool>(inert[t])) fail("inertness misplaced in source order" + tn(t));
        }
        for (index_t p = e.out_begin_[s]; p < e.out_inert_[s];) {
            index_t g = e.og_[e.out_[p]];
            if (g >= e.groups_.size() || e.groups_[g].begin != p || e.groups_[g].end > e.out_inert_[s] ||
                e.groups_[g].end <= p) {
                fail("bad bunch group at source " + std::to_string(s));
                break;
            }
            index_t bunch = e.bunch_of(e.out_[p]);
            if (bunch_stamp[bunch] == s) fail("bunch split over two groups at source " + std::to_string(s));
            bunch_stamp[bunch] = s;
            for (index_t q = p; q < e.groups_[g].end; ++q) {
                if (e.og_[e.out_[q]] != g) fail("group link mismatch" + tn(e.out_[q]));
                if (e.bunch_of(e.out_[q]) != bunch) fail("group mixes bunches" + tn(e.out_[q]));
            }
            p = e.groups_[g].end;
        }
        if (!(e.in_begin_[s] <= e.in_inert_end_[s] && e.in_inert_end_[s] <= e.in_end_[s] && e.in_end_[s] <= m)) {
            fail("bad incoming bounds of state " + std::to_string(s));
            continue;
        }
        total_in += e.in_end_[s] - e.in_begin_[s];
        for (index_t p = e.in_begin_[s]; p < e.in_end_[s]; ++p) {
            index_t t = e.in_[p];
            if (e.tgt_[t] != s) fail("incoming list of " + std::to_string(s) + " holds a foreign transition");
            if ((p < e.in_inert_end_[s]) != static_cast<bool>(inert[t])) fail("inertness misplaced in target order" + tn(t));
        }
    }
    if (total_out != m || total_in != m) fail("per-state transition lists do not cover all transitions");

    // bunches and action-block-slices
    std::vector<index_t> bunch_at(ni, npos);
    for (index_t b = 0; b < e.bunches_.size(); ++b) {
        const auto& B = e.bunches_[b];
        if (B.begin >= B.end || B.end > ni) {
            fail("bunch " + std::to_string(b) + " is empty or out of range");
            continue;
        }
        for (index_t p = B.begin; p < B.end; ++p) {
            if (bunch_at[p] != npos) fail("bunches overlap at " + std::to_string(p));
            bunch_at[p] = b;
        }
    }
    std::map<std::tuple<index_t, index_t, index_t>, index_t> abs_key, inv2;
    for (index_t p = 0; p < ni; ++p) {
        index_t t = e.ba_[p];
        index_t a = e.abs_of_[t];
        if (bunch_at[p] == npos) {
            fail("non-inert transition outside every bunch" + tn(t));
            continue;
        }
        if (a >= e.abs_.size()) {
            fail("missing action-block-slice" + tn(t));
            continue;
        }
        const auto& A = e.abs_[a];
        if (!(A.begin <= p && p < A.end)) fail("action-block-slice range mismatch" + tn(t));
        if (A.bunch != bunch_at[p]) fail("action-block-slice bunch mismatch" + tn(t));
        if (A.action != e.act_[t] || A.target_block != e.block_of_[e.tgt_[t]])
            fail("action-block-slice label or target mismatch" + tn(t));
        auto [it, fresh] = abs_key.try_emplace({A.bunch, A.action, A.target_block}, a);
        if (it->second != a) fail("two action-block-slices with the same action and target in one bunch");
        auto [it2, fresh2] = inv2.try_emplace({e.block_of_[e.src_[t]], e.act_[t], e.block_of_[e.tgt_[t]]}, A.bunch);
        if (it2->second != A.bunch) fail("equal source block, action and target block split over bunches" + tn(t));
    }

    // block-bunch-slices and their lists
    std::map<std::pair<index_t, index_t>, index_t> bbs_key;
    std::set<index_t> live;
    for (index_t p = 0; p < ni; ++p) {
        index_t t = e.bb_[p];
        index_t x = e.bbs_of_[t];
        if (x >= e.bbs_.size()) {
            fail("missing block-bunch-slice" + tn(t));
            continue;
        }
        const auto& X = e.bbs_[x];
        live.insert(x);
        if (!(X.begin <= p && p < X.end && X.begin <= X.marked_end && X.marked_end <= X.end))
            fail("block-bunch-slice range mismatch" + tn(t));
        if (X.block != e.block_of_[e.src_[t]] || X.bunch != e.bunch_of(t))
            fail("block-bunch-slice block or bunch mismatch" + tn(t));
        auto [it, fresh] = bbs_key.try_emplace({X.block, X.bunch}, x);
        if (it->second != x) fail("two block-bunch-slices with the same block and bunch");
    }
    std::set<index_t> listed;
    std::size_t splitter_len = 0;
    for (index_t x = e.splitter_head_, prev = npos; x != npos; prev = x, x = e.bbs_[x].next) {
        if (e.bbs_[x].stable) fail("stable slice on the splitter list");
        if (e.bbs_[x].prev != prev) fail("splitter list back link broken");
        if (!listed.insert(x).second) {
            fail("splitter list has a cycle");
            break;
        }
        ++splitter_len;
        if (x == e.splitter_tail_ && e.bbs_[x].next != npos) fail("splitter tail is not last");
    }
    for (index_t b = 0; b < e.blocks_.size(); ++b)
        for (index_t x = e.blocks_[b].stable_head, prev = npos; x != npos; prev = x, x = e.bbs_[x].next) {
            if (!e.bbs_[x].stable) fail("unstable slice on a stable list");
            if (e.bbs_[x].block != b) fail("slice on the stable list of another block");
            if (e.bbs_[x].prev != prev) fail("stable list back link broken");
            if (!listed.insert(x).second) {
                fail("slice on two lists");
                break;
            }
        }
    if (listed != live) fail("listed slices differ from slices in use");

    // bunch work stack
    std::set<index_t> stacked;
    for (index_t b : e.nontrivial_) {
        if (!stacked.insert(b).second) fail("bunch on the work stack twice");
        if (!e.bunches_[b].on_stack) fail("stacked bunch lacks its flag");
    }
    for (index_t b = 0; b < e.bunches_.size(); ++b) {
        if (e.bunches_[b].on_stack && !stacked.count(b)) fail("bunch flagged but not stacked");
        if (!e.bunch_trivial(b) && !e.bunches_[b].on_stack) fail("nontrivial bunch " + std::to_string(b) + " not stacked");
    }

    // stability: with no pending splitters every bottom state leaves by every bunch of its block
    if (splitter_len == 0) {
        std::vector<index_t> slices_of_block(e.blocks_.size(), 0);
        for (const auto& [key, x] : bbs_key) ++slices_of_block[key.first];
        std::vector<index_t> seen(e.bunches_.size(), npos);
        for (index_t s = 0; s < n; ++s) {
            if (inert_out[s] != 0) continue;
            index_t distinct = 0;
            for (index_t p = e.out_begin_[s]; p < e.out_end_[s]; ++p) {
                index_t b = e.bunch_of(e.out_[p]);
                if (seen[b] != s) {
                    seen[b] = s;
                    ++distinct;
                }
            }
            if (distinct != slices_of_block[e.block_of_[s]])
                fail("block " + std::to_string(e.block_of_[s]) + " is unstable: bottom state " + std::to_string(s) +
                     " misses a bunch");
        }
    }

    // no cycle of inert transitions
    std::vector<index_t> indeg(n, 0), queue;
    for (index_t t = 0; t < m; ++t)
        if (inert[t]) ++indeg[e.tgt_[t]];
    for (index_t s = 0; s < n; ++s)
        if (indeg[s] == 0) queue.push_back(s);
    for (std::size_t i = 0; i < queue.size(); ++i) {
        index_t s = queue[i];
        for (index_t p = e.out_inert_[s]; p < e.out_end_[s]; ++p)
            if (--indeg[e.tgt_[e.out_[p]]] == 0) queue.push_back(e.tgt_[e.out_[p]]);
    }
    if (queue.size() != n) fail("inert transitions form a cycle");
    return v;
}

void Engine::validate_checkpoint(const char* where) {
    if (!validate_) return;
    for (auto& msg : validate_engine(*this)) violations_.push_back(std::string(where) + ": " + msg);
}

}  // namespace branchmin

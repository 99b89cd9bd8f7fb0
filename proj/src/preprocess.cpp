#include "branchmin/preprocess.hpp"

#include <algorithm>

namespace branchmin {

namespace {

// Compressed adjacency over a subset of transitions.
struct Csr {
    std::vector<index_t> begin;
    std::vector<index_t> tgt;
};

template <class Keep>
Csr build_csr(const Lts& lts, Keep keep) {
    Csr g;
    g.begin.assign(lts.n + 1, 0);
    for (const auto& t : lts.transitions)
        if (keep(t)) ++g.begin[t.src + 1];
    for (index_t s = 0; s < lts.n; ++s) g.begin[s + 1] += g.begin[s];
    g.tgt.resize(g.begin[lts.n]);
    std::vector<index_t> fill(g.begin.begin(), g.begin.end() - 1);
    for (const auto& t : lts.transitions)
        if (keep(t)) g.tgt[fill[t.src]++] = t.tgt;
    return g;
}

}  // namespace

Reduced prune_unreachable(const Lts& lts) {
    Csr g = build_csr(lts, [](const Transition&) { return true; });
    std::vector<char> seen(lts.n, 0);
    std::vector<index_t> stack{lts.initial};
    seen[lts.initial] = 1;
    while (!stack.empty()) {
        index_t s = stack.back();
        stack.pop_back();
        for (index_t i = g.begin[s]; i < g.begin[s + 1]; ++i)
            if (!seen[g.tgt[i]]) {
                seen[g.tgt[i]] = 1;
                stack.push_back(g.tgt[i]);
            }
    }
    Reduced r;
    r.map.map.assign(lts.n, npos);
    index_t next = 0;
    r.map.map[lts.initial] = next++;
    for (index_t s = 0; s < lts.n; ++s)
        if (seen[s] && s != lts.initial) r.map.map[s] = next++;
    r.lts.n = next;
    r.lts.initial = 0;
    r.lts.actions = lts.actions;
    for (const auto& t : lts.transitions)
        if (seen[t.src]) r.lts.transitions.push_back({r.map.map[t.src], t.label, r.map.map[t.tgt]});
    normalize(r.lts);
    return r;
}

Contracted contract_tau_sccs(const Lts& lts) {
    const index_t n = lts.n;
    Csr g = build_csr(lts, [&](const Transition& t) { return lts.actions.is_internal(t.label); });

    // Iterative Tarjan.
    std::vector<index_t> index(n, npos), low(n, 0), comp(n, npos);
    std::vector<char> on_stack(n, 0);
    std::vector<index_t> scc_stack;
    struct Frame {
        index_t v;
        index_t edge;
    };
    std::vector<Frame> call;
    index_t counter = 0, comps = 0;
    for (index_t root = 0; root < n; ++root) {
        if (index[root] != npos) continue;
        call.push_back({root, g.begin[root]});
        index[root] = low[root] = counter++;
        scc_stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            index_t v = f.v;
            if (f.edge < g.begin[v + 1]) {
                index_t w = g.tgt[f.edge++];
                if (index[w] == npos) {
                    index[w] = low[w] = counter++;
                    scc_stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, g.begin[w]});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                index_t w;
                do {
                    w = scc_stack.back();
                    scc_stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = comps;
                } while (w != v);
                ++comps;
            }
            call.pop_back();
            if (!call.empty()) {
                index_t u = call.back().v;
                low[u] = std::min(low[u], low[v]);
            }
        }
    }

    // Renumber components by their lowest member.
    std::vector<index_t> comp_id(comps, npos), comp_size(comps, 0);
    index_t next = 0;
    for (index_t s = 0; s < n; ++s) {
        if (comp_id[comp[s]] == npos) comp_id[comp[s]] = next++;
        ++comp_size[comp[s]];
    }

    Contracted c;
    c.map.map.resize(n);
    for (index_t s = 0; s < n; ++s) c.map.map[s] = comp_id[comp[s]];
    for (index_t k = 0; k < comps; ++k)
        if (comp_size[k] > 1) ++c.sccs_contracted;
    c.lts.n = next;
    c.lts.initial = c.map.map[lts.initial];
    c.lts.actions = lts.actions;
    c.lts.transitions.reserve(lts.m());
    for (const auto& t : lts.transitions) {
        Transition u{c.map.map[t.src], t.label, c.map.map[t.tgt]};
        if (u.src == u.tgt && lts.actions.is_internal(t.label)) {
            ++c.self_loops_dropped;
            continue;
        }
        c.lts.transitions.push_back(u);
    }
    normalize(c.lts);
    return c;
}

Preprocessed preprocess(const Lts& lts, bool prune) {
    Preprocessed p;
    StateMap map = StateMap::identity(lts.n);
    const Lts* cur = &lts;
    Reduced r;
    if (prune) {
        r = prune_unreachable(lts);
        p.report.removed_unreachable = lts.n - r.lts.n;
        map = r.map;
        cur = &r.lts;
    }
    Contracted c = contract_tau_sccs(*cur);
    p.report.scc_count_contracted = c.sccs_contracted;
    p.report.tau_self_loops_dropped = c.self_loops_dropped;
    p.report.map = map.then(c.map);
    p.lts = std::move(c.lts);
    return p;
}

InitialPartition initial_partition(const Lts& lts) {
    const index_t n = lts.n;
    // Backward closure along internal transitions from sources of visible ones.
    std::vector<index_t> pred_begin(n + 1, 0), pred;
    for (const auto& t : lts.transitions)
        if (lts.actions.is_internal(t.label)) ++pred_begin[t.tgt + 1];
    for (index_t s = 0; s < n; ++s) pred_begin[s + 1] += pred_begin[s];
    pred.resize(pred_begin[n]);
    {
        std::vector<index_t> fill(pred_begin.begin(), pred_begin.end() - 1);
        for (const auto& t : lts.transitions)
            if (lts.actions.is_internal(t.label)) pred[fill[t.tgt]++] = t.src;
    }
    std::vector<char> vis(n, 0);
    std::vector<index_t> stack;
    for (const auto& t : lts.transitions)
        if (!lts.actions.is_internal(t.label) && !vis[t.src]) {
            vis[t.src] = 1;
            stack.push_back(t.src);
        }
    while (!stack.empty()) {
        index_t s = stack.back();
        stack.pop_back();
        for (index_t i = pred_begin[s]; i < pred_begin[s + 1]; ++i)
            if (!vis[pred[i]]) {
                vis[pred[i]] = 1;
                stack.push_back(pred[i]);
            }
    }
    bool any_vis = std::find(vis.begin(), vis.end(), 1) != vis.end();
    bool any_invis = std::find(vis.begin(), vis.end(), 0) != vis.end();
    InitialPartition ip;
    ip.block_count = static_cast<index_t>(any_vis) + static_cast<index_t>(any_invis);
    ip.block_of.resize(n);
    for (index_t s = 0; s < n; ++s) ip.block_of[s] = (vis[s] || !any_vis) ? 0 : 1;
    for (index_t i = 0; i < lts.m(); ++i) {
        const auto& t = lts.transitions[i];
        if (!lts.actions.is_internal(t.label) || ip.block_of[t.src] != ip.block_of[t.tgt]) ip.bunch.push_back(i);
    }
    return ip;
}

bool tau_acyclic(const Lts& lts) {
    std::vector<index_t> indeg(lts.n, 0);
    Csr g = build_csr(lts, [&](const Transition& t) { return lts.actions.is_internal(t.label); });
    for (index_t v : g.tgt) ++indeg[v];
    std::vector<index_t> queue;
    for (index_t s = 0; s < lts.n; ++s)
        if (indeg[s] == 0) queue.push_back(s);
    std::size_t done = 0;
    while (done < queue.size()) {
        index_t s = queue[done++];
        for (index_t i = g.begin[s]; i < g.begin[s + 1]; ++i)
            if (--indeg[g.tgt[i]] == 0) queue.push_back(g.tgt[i]);
    }
    return done == lts.n;
}

}  // namespace branchmin

#include "branchmin/minimizer.hpp"

#include <algorithm>

namespace branchmin {

Partition canonical(const Partition& p) {
    Partition c;
    c.block_of.assign(p.block_of.size(), npos);
    std::vector<index_t> id(p.block_count, npos);
    for (std::size_t s = 0; s < p.block_of.size(); ++s) {
        index_t b = p.block_of[s];
        if (b == npos) continue;
        if (id[b] == npos) id[b] = c.block_count++;
        c.block_of[s] = id[b];
    }
    return c;
}

bool same_partition(const Partition& a, const Partition& b) {
    if (a.block_of.size() != b.block_of.size()) return false;
    return canonical(a).block_of == canonical(b).block_of;
}

bool is_discrete(const Partition& p) {
    index_t defined = 0;
    for (index_t b : p.block_of)
        if (b != npos) ++defined;
    return canonical(p).block_count == defined;
}

Lts quotient(const Lts& lts, const Partition& p) {
    index_t tau = npos;
    for (index_t l = 0; l < lts.actions.size(); ++l)
        if (lts.actions.is_internal(l)) {
            tau = l;
            break;
        }
    Lts q;
    q.n = std::max<index_t>(p.block_count, 1);
    q.initial = p.block_of[lts.initial];
    q.actions = lts.actions;
    for (const auto& t : lts.transitions) {
        index_t s = p.block_of[t.src], u = p.block_of[t.tgt];
        if (s == npos) continue;
        bool internal = lts.actions.is_internal(t.label);
        if (internal && s == u) continue;
        q.transitions.push_back({s, internal ? tau : t.label, u});
    }
    normalize(q);
    return q;
}

MinimizeResult minimize(const Lts& lts, const MinimizeOptions& opts) {
    MinimizeResult res;
    Preprocessed pre = preprocess(lts, opts.prune_unreachable);
    res.report = pre.report;
    res.pre_n = pre.lts.n;
    res.pre_m = pre.lts.m();

    Engine e(pre.lts);
    if (opts.trace) e.set_trace(opts.trace);
    e.set_validate(opts.validate);
    e.run();
    res.work = e.work();
    res.violations = e.violations();

    Partition engine_part;
    engine_part.block_count = e.block_count();
    engine_part.block_of.resize(lts.n, npos);
    for (index_t s = 0; s < lts.n; ++s) {
        index_t r = pre.report.map.map[s];
        if (r != npos) engine_part.block_of[s] = e.block_of(r);
    }
    res.partition = canonical(engine_part);
    res.map.map = res.partition.block_of;
    res.quotient = quotient(lts, res.partition);
    return res;
}

DisjointUnion disjoint_union(const Lts& a, const Lts& b) {
    DisjointUnion u;
    u.offset = a.n;
    u.lts.n = a.n + b.n;
    u.lts.initial = a.initial;
    u.lts.actions = a.actions;
    for (const auto& t : a.transitions) u.lts.transitions.push_back(t);
    std::vector<index_t> relabel(b.actions.size());
    for (index_t l = 0; l < b.actions.size(); ++l) {
        const std::string& name = b.actions.labels[l];
        bool internal = b.actions.is_internal(l);
        index_t existing = u.lts.actions.find(name);
        if (existing != npos && u.lts.actions.is_internal(existing) != internal)
            throw LabelConflict("label '" + name + "' is internal in one system and visible in the other");
        relabel[l] = u.lts.actions.intern(name, internal);
    }
    for (const auto& t : b.transitions)
        u.lts.transitions.push_back({t.src + u.offset, relabel[t.label], t.tgt + u.offset});
    normalize(u.lts);
    return u;
}

EquivalenceResult equivalent(const Lts& a, const Lts& b, bool validate) {
    DisjointUnion u = disjoint_union(a, b);
    MinimizeOptions opts;
    opts.prune_unreachable = false;
    opts.validate = validate;
    MinimizeResult r = minimize(u.lts, opts);
    if (!r.violations.empty()) throw std::logic_error("invariant violation: " + r.violations.front());
    EquivalenceResult res;
    res.partition = r.partition;
    res.equivalent = r.partition.block_of[a.initial] == r.partition.block_of[b.initial + u.offset];
    return res;
}

}  // namespace branchmin

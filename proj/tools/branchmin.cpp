#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "branchmin/lts.hpp"
#include "branchmin/minimizer.hpp"
#include "branchmin/verify.hpp"

using namespace branchmin;
using json = nlohmann::json;

namespace {

struct Failure {
    int code;
    std::string msg;
};

std::set<std::string> split_labels(const std::string& csv) {
    std::set<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(item);
    return out;
}

// Labels absent from the file are ignored, so one list can serve several inputs.
Lts load(const std::string& path, const std::optional<std::string>& tau, int io_code) {
    Lts l;
    try {
        l = path == "-" ? parse_aut(std::cin) : read_aut_file(path);
    } catch (const ParseError& e) {
        throw Failure{io_code, path + ": " + e.what()};
    } catch (const std::exception& e) {
        throw Failure{io_code, e.what()};
    }
    if (tau) {
        std::set<std::string> present;
        for (const auto& name : split_labels(*tau))
            if (l.actions.find(name) != npos) present.insert(name);
        l = set_internal(l, present);
    }
    return l;
}

void store(const std::string& path, const Lts& l, int io_code) {
    try {
        if (path == "-") write_aut(std::cout, l);
        else write_aut_file(path, l);
    } catch (const std::exception& e) {
        throw Failure{io_code, e.what()};
    }
}

long peak_rss_kb() {
    rusage ru{};
    if (getrusage(RUSAGE_SELF, &ru) != 0) return -1;
    return ru.ru_maxrss;
}

json work_json(const WorkCounters& w) {
    return {{"bunch_units", w.bunch_units},
            {"smaller_block_units", w.smaller_block_units},
            {"new_bottom_units", w.new_bottom_units},
            {"total", w.total()}};
}

struct MinimizeArgs {
    std::string in, out, map_path, report;
    std::optional<std::string> tau;
    bool validate = false, keep_unreachable = false;
};

int cmd_minimize(const MinimizeArgs& a) {
    auto t0 = std::chrono::steady_clock::now();
    Lts l = load(a.in, a.tau, 1);
    MinimizeOptions opts;
    opts.validate = a.validate;
    opts.prune_unreachable = !a.keep_unreachable;
    MinimizeResult r = minimize(l, opts);
    store(a.out, r.quotient, 1);
    if (!a.map_path.empty()) {
        std::ofstream mf(a.map_path);
        if (!mf) throw Failure{1, "cannot write " + a.map_path};
        for (index_t s = 0; s < l.n; ++s) {
            mf << s << ' ';
            if (r.map.map[s] == npos) mf << "-\n";
            else mf << r.map.map[s] << '\n';
        }
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (a.report == "json") {
        json j = {{"schema", 1},
                  {"input", {{"n", l.n}, {"m", l.m()}, {"actions", l.actions.size()}}},
                  {"preprocessed",
                   {{"n", r.pre_n},
                    {"m", r.pre_m},
                    {"removed_unreachable", r.report.removed_unreachable},
                    {"tau_sccs_contracted", r.report.scc_count_contracted},
                    {"tau_self_loops_dropped", r.report.tau_self_loops_dropped}}},
                  {"output", {{"n", r.quotient.n}, {"m", r.quotient.m()}}},
                  {"blocks", r.partition.block_count},
                  {"work", work_json(r.work)},
                  {"elapsed_ms", ms},
                  {"peak_rss_kb", peak_rss_kb()},
                  {"violations", r.violations}};
        std::cout << j.dump(2) << '\n';
    } else if (a.report == "text") {
        std::cout << "input         n=" << l.n << " m=" << l.m() << " actions=" << l.actions.size() << '\n'
                  << "preprocessed  n=" << r.pre_n << " m=" << r.pre_m
                  << " unreachable=" << r.report.removed_unreachable
                  << " tau_sccs=" << r.report.scc_count_contracted << '\n'
                  << "output        n=" << r.quotient.n << " m=" << r.quotient.m() << '\n'
                  << "work          bunch=" << r.work.bunch_units << " smaller_block=" << r.work.smaller_block_units
                  << " new_bottom=" << r.work.new_bottom_units << " total=" << r.work.total() << '\n'
                  << "elapsed_ms    " << ms << '\n'
                  << "peak_rss_kb   " << peak_rss_kb() << '\n';
    }
    if (!r.violations.empty()) {
        for (const auto& v : r.violations) std::cerr << "violation: " << v << '\n';
        return 2;
    }
    return 0;
}

int cmd_compare(const std::string& p1, const std::string& p2, const std::optional<std::string>& tau, bool validate) {
    Lts a = load(p1, tau, 2), b = load(p2, tau, 2);
    EquivalenceResult r;
    try {
        r = equivalent(a, b, validate);
    } catch (const std::exception& e) {
        throw Failure{2, e.what()};
    }
    std::cout << (r.equivalent ? "equivalent" : "not-equivalent") << '\n';
    return r.equivalent ? 0 : 1;
}

int cmd_stats(const std::string& in, const std::optional<std::string>& tau, const std::string& report) {
    Lts l = load(in, tau, 1);
    std::size_t internal = 0;
    for (const auto& t : l.transitions)
        if (l.actions.is_internal(t.label)) ++internal;
    Preprocessed p = preprocess(l, true);
    if (report == "json") {
        json j = {{"schema", 1},
                  {"n", l.n},
                  {"m", l.m()},
                  {"actions", l.actions.size()},
                  {"internal_transitions", internal},
                  {"reachable", l.n - p.report.removed_unreachable},
                  {"tau_sccs_contracted", p.report.scc_count_contracted},
                  {"preprocessed", {{"n", p.lts.n}, {"m", p.lts.m()}}}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "states        " << l.n << '\n'
                  << "transitions   " << l.m() << '\n'
                  << "actions       " << l.actions.size() << '\n'
                  << "internal      " << internal << '\n'
                  << "reachable     " << l.n - p.report.removed_unreachable << '\n'
                  << "tau_sccs      " << p.report.scc_count_contracted << '\n'
                  << "preprocessed  n=" << p.lts.n << " m=" << p.lts.m() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Branching bisimulation minimization of labelled transition systems"};
    app.require_subcommand(1);

    MinimizeArgs ma;
    auto* mini = app.add_subcommand("minimize", "write the quotient modulo branching bisimilarity");
    mini->add_option("input", ma.in, "input .aut file (- for stdin)")->required();
    mini->add_option("output", ma.out, "output .aut file (- for stdout)")->required();
    mini->add_option("--map", ma.map_path, "write 'state block' lines");
    mini->add_option("--tau", ma.tau, "comma-separated internal labels (default tau,i)");
    mini->add_option("--report", ma.report, "print a run report")->check(CLI::IsMember({"json", "text"}));
    mini->add_flag("--validate", ma.validate, "check engine invariants during the run");
    mini->add_flag("--keep-unreachable", ma.keep_unreachable, "do not prune unreachable states");

    std::string c1, c2;
    std::optional<std::string> ctau;
    bool cvalidate = false;
    auto* comp = app.add_subcommand("compare", "decide branching bisimilarity of two initial states");
    comp->add_option("first", c1)->required();
    comp->add_option("second", c2)->required();
    comp->add_option("--tau", ctau, "comma-separated internal labels");
    comp->add_flag("--validate", cvalidate);

    std::string sin, sreport = "text";
    std::optional<std::string> stau;
    auto* stats = app.add_subcommand("stats", "print structural characteristics");
    stats->add_option("input", sin)->required();
    stats->add_option("--tau", stau, "comma-separated internal labels");
    stats->add_option("--report", sreport)->check(CLI::IsMember({"json", "text"}));

    auto* gen = app.add_subcommand("gen", "generate an LTS");
    gen->require_subcommand(1);
    GenConfig cfg;
    std::string gout = "-";
    auto* grand = gen->add_subcommand("random", "seeded random LTS, all states reachable");
    grand->add_option("--seed", cfg.seed);
    grand->add_option("--n-max", cfg.n_max)->check(CLI::PositiveNumber);
    grand->add_option("--m-max", cfg.m_max);
    grand->add_option("--labels", cfg.label_count, "label count including tau")->check(CLI::PositiveNumber);
    grand->add_option("--tau-fraction", cfg.tau_fraction)->check(CLI::Range(0.0, 1.0));
    grand->add_flag("--exact", cfg.exact_size, "use exactly n-max states and m-max draws");
    grand->add_option("output", gout);
    index_t k = 0, cn = 0;
    auto* gapp = gen->add_subcommand("appendix-a", "two states, 2k+2 transitions");
    gapp->add_option("--k", k)->required()->check(CLI::PositiveNumber);
    gapp->add_option("output", gout);
    auto* gcyc = gen->add_subcommand("tau-cycle", "one tau-cycle through n states");
    gcyc->add_option("--n", cn)->required()->check(CLI::PositiveNumber);
    gcyc->add_option("output", gout);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*mini) return cmd_minimize(ma);
        if (*comp) return cmd_compare(c1, c2, ctau, cvalidate);
        if (*stats) return cmd_stats(sin, stau, sreport);
        if (*grand) store(gout, gen_random(cfg), 2);
        else if (*gapp) store(gout, gen_appendix_a(k), 2);
        else if (*gcyc) store(gout, gen_tau_cycle(cn), 2);
        return 0;
    } catch (const Failure& f) {
        std::cerr << "branchmin: " << f.msg << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "branchmin: " << e.what() << '\n';
        return 2;
    }
}

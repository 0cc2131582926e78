#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "treechild/clusters.hpp"
#include "treechild/generator.hpp"
#include "treechild/newick.hpp"
#include "treechild/oracle.hpp"
#include "treechild/search.hpp"

namespace {

using namespace treechild;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << text;
}

Instance load_instance(const std::string& path) {
    std::vector<std::string> warnings;
    Instance inst = newick::parse_instance(read_input(path), &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
    return inst;
}

// sequence files: one "(x,y)" or "(x,-)" per line; other lines are ignored so
// solve reports can be fed back directly
CherryPickingSequence parse_sequence_file(const std::string& text, const TaxonTable& taxa) {
    CherryPickingSequence s;
    s.taxa_count = static_cast<int>(taxa.size());
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos || line[a] != '(') continue;
        size_t close = line.find(')', a);
        size_t comma = line.find(',', a);
        if (close == std::string::npos || comma == std::string::npos || comma > close)
            throw std::runtime_error("line " + std::to_string(lineno) + ": malformed pair");
        std::string xs = line.substr(a + 1, comma - a - 1);
        std::string ys = line.substr(comma + 1, close - comma - 1);
        TaxonId x = taxa.find(xs);
        if (x == kNoTaxon)
            throw std::runtime_error("line " + std::to_string(lineno) + ": unknown taxon '" + xs + "'");
        if (ys == "-") {
            s.entries.push_back(Pair{x, kNoTaxon});
            continue;
        }
        TaxonId y = taxa.find(ys);
        if (y == kNoTaxon)
            throw std::runtime_error("line " + std::to_string(lineno) + ": unknown taxon '" + ys + "'");
        s.entries.push_back(Pair{x, y});
    }
    if (s.entries.empty()) throw std::runtime_error("no sequence entries in input");
    return s;
}

int cmd_solve(const std::string& input, const std::string& output, const SolveOptions& opts) {
    Instance inst = load_instance(input);
    SolveResult res = solve(inst, opts);
    if (res.outcome == SolveOutcome::TimedOut) {
        emit(output, "time limit exceeded\n");
        return 3;
    }
    if (res.outcome == SolveOutcome::NoSolutionWithinMaxK) {
        emit(output, "no tree-child solution with k <= " + std::to_string(opts.max_k.value_or(-1)) +
                         "\n");
        return 1;
    }
    const Solution& sol = *res.solution;
    std::ostringstream out;
    out << "h_tc: " << sol.weight << "\n";
    out << sol.sequence.to_string(inst.taxa);
    out << "network: " << newick::write_network(sol.network, inst.taxa) << "\n";
    emit(output, out.str());
    return 0;
}

int cmd_generate(int n, int k, int t, uint64_t seed, const std::string& output) {
    GeneratedInstance gen = generate_instance(GenParams{n, k, t, seed});
    std::ostringstream out;
    for (const Tree& tree : gen.instance.trees)
        out << newick::write_tree(tree, gen.instance.taxa) << "\n";
    out << "# generator_reticulations: " << reticulation_number(gen.network) << "\n";
    emit(output, out.str());
    return 0;
}

int cmd_verify(const std::string& input, const std::string& seq_path, const std::string& net_path,
               const std::string& output) {
    Instance inst = load_instance(input);
    std::ostringstream out;
    int status = 0;
    if (!seq_path.empty()) {
        CherryPickingSequence s = parse_sequence_file(read_input(seq_path), inst.taxa);
        SequenceReport rep = apply_sequence(inst, s);
        out << "valid: " << (rep.is_cps ? "yes" : "no") << "\n";
        out << "tree_child: " << (rep.is_tree_child ? "yes" : "no") << "\n";
        out << "weight: " << rep.weight << "\n";
        status = rep.is_cps && rep.is_tree_child ? 0 : 1;
    } else {
        TreeChildNetwork net = newick::parse_network(read_input(net_path));
        int shown = 0, unverifiable = 0;
        for (const Tree& tree : inst.trees) {
            switch (displays(net, tree)) {
            case DisplayResult::Yes: ++shown; break;
            case DisplayResult::Unverifiable: ++unverifiable; break;
            case DisplayResult::No: break;
            }
        }
        out << "displays: " << shown << "/" << inst.trees.size() << "\n";
        if (unverifiable) out << "unverifiable: " << unverifiable << "\n";
        out << "tree_child: " << (is_tree_child(net) ? "yes" : "no") << "\n";
        out << "reticulations: " << reticulation_number(net) << "\n";
        status = shown == static_cast<int>(inst.trees.size()) ? 0 : 1;
    }
    emit(output, out.str());
    return status;
}

int cmd_oracle(const std::string& input, int max_k, const std::string& output) {
    Instance inst = load_instance(input);
    OracleResult res = brute_force_htc(inst, max_k);
    std::ostringstream out;
    if (!res.min_weight) {
        out << "no tree-child solution with k <= " << max_k << "\n";
        out << "explored: " << res.explored << "\n";
        emit(output, out.str());
        return 1;
    }
    out << "min_weight: " << *res.min_weight << "\n";
    out << res.witness->to_string(inst.taxa);
    out << "explored: " << res.explored << "\n";
    emit(output, out.str());
    return 0;
}

int cmd_stats(const std::string& input, const std::string& output) {
    Instance inst = load_instance(input);
    SearchState st(inst);
    std::ostringstream out;
    out << "n: " << inst.n() << "\n";
    out << "t: " << inst.t() << "\n";
    out << "unique_cherries: " << st.unique_cherries() << "\n";
    out << "trivial_cherries: " << st.trivial_cherries().size() << "\n";
    ClusterNode root = find_common_clusters(inst);
    std::vector<size_t> sizes;
    std::function<void(const ClusterNode&)> walk = [&](const ClusterNode& node) {
        for (const ClusterNode& ch : node.children) {
            sizes.push_back(ch.taxa.size());
            walk(ch);
        }
    };
    walk(root);
    std::sort(sizes.rbegin(), sizes.rend());
    out << "clusters:";
    if (sizes.empty()) out << " none";
    for (size_t s : sizes) out << " " << s;
    out << "\n";
    emit(output, out.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact tree-child hybridization networks from binary trees"};
    app.require_subcommand(1);

    std::string input = "-", output;
    SolveOptions opts;
    int max_k = -1;
    double time_limit = 0;

    auto* solve_cmd = app.add_subcommand("solve", "compute a minimum-weight tree-child sequence and network");
    solve_cmd->add_option("input", input, "Newick file, one tree per line ('-' = stdin)");
    solve_cmd->add_option("-o,--output", output, "write the report to a file");
    solve_cmd->add_option("-p,--workers", opts.workers, "worker threads")->check(CLI::PositiveNumber);
    solve_cmd->add_option("-w,--poll-interval", opts.poll_interval, "iterations between work-request checks")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_flag_callback("--no-rbe", [&] { opts.use_rbe = false; },
                                 "disable redundant branch elimination");
    solve_cmd->add_flag_callback("--no-clusters", [&] { opts.use_clusters = false; },
                                 "disable cluster reduction");
    solve_cmd->add_option("--max-k", max_k, "give up beyond this reticulation number");
    solve_cmd->add_option("--time-limit", time_limit, "wall-clock limit in seconds");

    int gen_n = 20, gen_k = 5, gen_t = 10;
    uint64_t gen_seed = 0;
    std::string gen_output;
    auto* gen_cmd = app.add_subcommand("generate", "write a random tree-child instance");
    gen_cmd->add_option("-n,--leaves", gen_n, "number of leaves")->required();
    gen_cmd->add_option("-k,--reticulations", gen_k, "target reticulations")->required();
    gen_cmd->add_option("-t,--trees", gen_t, "target tree count")->required();
    gen_cmd->add_option("--seed", gen_seed, "random seed");
    gen_cmd->add_option("-o,--output", gen_output, "write to a file");

    std::string verify_input = "-", verify_seq, verify_net, verify_output;
    auto* verify_cmd = app.add_subcommand("verify", "validate a sequence or a network against trees");
    verify_cmd->add_option("input", verify_input, "Newick tree file");
    auto* vs = verify_cmd->add_option("--sequence", verify_seq, "sequence file to validate");
    auto* vn = verify_cmd->add_option("--network", verify_net, "eNewick network to check");
    verify_cmd->add_option("-o,--output", verify_output, "write to a file");
    vs->excludes(vn);

    std::string oracle_input = "-", oracle_output;
    int oracle_k = 10;
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force reference solver for small instances");
    oracle_cmd->add_option("input", oracle_input, "Newick tree file");
    oracle_cmd->add_option("--max-k", oracle_k, "weight bound");
    oracle_cmd->add_option("-o,--output", oracle_output, "write to a file");

    std::string stats_input = "-", stats_output;
    auto* stats_cmd = app.add_subcommand("stats", "instance summary: cherries, clusters");
    stats_cmd->add_option("input", stats_input, "Newick tree file");
    stats_cmd->add_option("-o,--output", stats_output, "write to a file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) {
            if (max_k >= 0) opts.max_k = max_k;
            if (time_limit > 0) opts.time_limit_s = time_limit;
            return cmd_solve(input, output, opts);
        }
        if (gen_cmd->parsed()) return cmd_generate(gen_n, gen_k, gen_t, gen_seed, gen_output);
        if (verify_cmd->parsed()) {
            if (verify_seq.empty() && verify_net.empty()) {
                std::cerr << "verify: need --sequence or --network\n";
                return 2;
            }
            return cmd_verify(verify_input, verify_seq, verify_net, verify_output);
        }
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_input, oracle_k, oracle_output);
        if (stats_cmd->parsed()) return cmd_stats(stats_input, stats_output);
    } catch (const newick::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

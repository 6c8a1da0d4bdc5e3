// reachmax command-line front end. States are numbered from 1 on the command
// line and in CHAIN files; tags are named as in the BIPARTITE file.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reachmax/baselines.hpp"
#include "reachmax/errors.hpp"
#include "reachmax/greedy.hpp"
#include "reachmax/io.hpp"
#include "reachmax/oracle.hpp"
#include "reachmax/parallel.hpp"
#include "reachmax/reach_objective.hpp"
#include "reachmax/sweep.hpp"
#include "reachmax/synthetic.hpp"
#include "reachmax/tag_graph.hpp"

using namespace reachmax;

namespace {

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2 };

struct Common {
    std::uint64_t seed = 0;
    std::string out;
};

// Writes to --out when given, else stdout.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw std::runtime_error("cannot write " + path);
            }
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

bool is_chain_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') {
            continue;
        }
        return line.compare(pos, 5, "CHAIN") == 0;
    }
    return false;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string tok;
    std::istringstream is(s);
    while (std::getline(is, tok, ',')) {
        auto b = tok.find_first_not_of(" \t");
        auto e = tok.find_last_not_of(" \t");
        if (b != std::string::npos) {
            out.push_back(tok.substr(b, e - b + 1));
        }
    }
    return out;
}

// A chain to optimize over, with names for its states.
struct Problem {
    ChainSpec spec;
    std::optional<TagGraph> graph;
    std::vector<std::size_t> candidates;

    std::string name(std::size_t i) const
    {
        return graph ? graph->tags[i] : std::to_string(i + 1);
    }

    std::size_t index(const std::string& token) const
    {
        if (graph) {
            if (auto j = graph->find_tag(token)) {
                return *j;
            }
            throw std::invalid_argument("unknown tag " + token);
        }
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(token, &pos);
        } catch (const std::logic_error&) {
            pos = 0;
        }
        if (pos != token.size() || v < 1 || v > spec.n_transient) {
            throw std::invalid_argument("state " + token + " is not in 1.." +
                                        std::to_string(spec.n_transient));
        }
        return v - 1;
    }

    StateSet selection(const std::string& list) const
    {
        std::vector<std::size_t> s;
        for (const auto& tok : split_list(list)) {
            s.push_back(index(tok));
        }
        return StateSet(std::move(s));
    }

    std::string render(const StateSet& s) const
    {
        std::string out = "{";
        for (std::size_t i : s) {
            out += (out.size() > 1 ? "," : "") + name(i);
        }
        return out + "}";
    }
};

Problem load_problem(const std::string& path)
{
    Problem p;
    if (is_chain_file(path)) {
        ValidationReport report;
        p.spec = parse_chain_file(path, &report);
        for (const auto& note : report.notes) {
            std::cerr << "note: " << note << '\n';
        }
        for (std::size_t i = 0; i < p.spec.n_transient; ++i) {
            p.candidates.push_back(i);
        }
    } else {
        p.graph = parse_bipartite_file(path);
        p.spec = fold(*p.graph).spec;
        p.candidates = p.graph->resolved_candidates();
    }
    return p;
}

void add_common(CLI::App* cmd, Common& common)
{
    cmd->add_option("--seed", common.seed, "Random seed");
    cmd->add_option("--out", common.out, "Output file (default stdout)");
}

int cmd_validate(const std::string& path, const Common& common)
{
    Sink sink(common.out);
    auto& os = sink.get();
    if (!is_chain_file(path)) {
        TagGraph g = parse_bipartite_file(path);
        os << "ok: " << g.tags.size() << " tags, " << g.items.size() << " items, "
           << g.edges.size() << " edges\n";
        return kOk;
    }
    std::ifstream in(path);
    ValidationReport report;
    ChainSpec spec = read_chain(in, report);
    for (const auto& note : report.notes) {
        os << "note: " << note << '\n';
    }
    if (!report.ok()) {
        os << report.to_string();
        if (report.to_string().back() != '\n') {
            os << '\n';
        }
        return kValidation;
    }
    os << "ok: " << spec.n_transient << " transient states, " << spec.absorbing.size()
       << " absorbing\n";
    return kOk;
}

int cmd_evaluate(const std::string& path, const std::string& set, std::size_t walks,
                 const Common& common)
{
    Problem p = load_problem(path);
    StateSet s = p.selection(set);
    ReachResult r = eval_reach(p.spec, s);
    if (r.clamp_excess > kClampWarning) {
        std::cerr << "warning: clamped c by " << r.clamp_excess << '\n';
    }
    Sink sink(common.out);
    auto& os = sink.get();
    os << "S = " << p.render(s) << '\n';
    os << "f = " << format_probability(r.f) << '\n';
    os << "residual = " << format_probability(r.residual) << '\n';
    for (std::size_t i = 0; i < r.c.size(); ++i) {
        os << "c[" << p.name(i) << "] = " << format_probability(r.c[i]) << '\n';
    }
    if (walks > 0) {
        McEstimate mc = monte_carlo_f(p.spec, s, walks, 0, common.seed, worker_count());
        os << "monte_carlo = " << format_probability(mc.estimate) << " +- "
           << format_probability(mc.std_error) << " (" << mc.walks << " walks, seed "
           << mc.seed << ")\n";
    }
    return kOk;
}

int cmd_optimize(const std::string& path, std::size_t k, const std::string& method,
                 const Common& common)
{
    Problem p = load_problem(path);
    Sink sink(common.out);
    auto& os = sink.get();
    if (method == "greedy" || method == "lazy-greedy") {
        GreedyOptions options;
        options.candidates = p.candidates;
        GreedyResult r = method == "greedy" ? simple_greedy(p.spec, k, options)
                                            : lazy_greedy(p.spec, k, options);
        os << "step,state,f,gain,evals\n";
        for (std::size_t t = 0; t < r.trace.chosen.size(); ++t) {
            os << (t + 1) << ',' << p.name(r.trace.chosen[t]) << ','
               << format_probability(r.trace.f_values[t]) << ','
               << format_probability(r.trace.gains[t]) << ',' << r.trace.evals_per_round[t]
               << '\n';
        }
        os << "# S = " << p.render(r.selection) << '\n';
        os << "# n_evals = " << r.trace.n_evals << '\n';
        if (r.trace.unused_budget > 0) {
            os << "# saturated with " << r.trace.unused_budget << " unused\n";
        }
        return kOk;
    }
    StateSet s;
    if (method == "exhaustive") {
        s = exhaustive_opt(p.spec, k).first;
    } else {
        if (!p.graph) {
            throw std::invalid_argument("method " + method + " needs a BIPARTITE dataset");
        }
        const TagGraph& g = *p.graph;
        if (method == "pagerank") {
            s = pagerank_select(g, k);
        } else if (method == "degree-high" || method == "degree-low") {
            s = degree_select(g, k, method == "degree-high");
        } else if (method == "one-step") {
            s = one_step_select(g, k);
        } else if (method == "random") {
            s = random_select(g, k, common.seed);
        } else if (method == "true-tags") {
            s = true_tags_select(g, k);
        } else {
            throw std::invalid_argument("unknown method " + method);
        }
    }
    os << "S = " << p.render(s) << '\n';
    os << "f = " << format_probability(eval_reach(p.spec, s).f) << '\n';
    return kOk;
}

int cmd_fold_check(const std::string& path, const std::string& set, const Common& common)
{
    TagGraph g = parse_bipartite_file(path);
    std::vector<std::size_t> tags;
    for (const auto& name : split_list(set)) {
        auto j = g.find_tag(name);
        if (!j) {
            throw std::invalid_argument("unknown tag " + name);
        }
        tags.push_back(*j);
    }
    FoldCheck check = fold_equivalence_check(g, StateSet(std::move(tags)));
    Sink sink(common.out);
    auto& os = sink.get();
    os << "f_folded = " << format_probability(check.f_folded) << '\n';
    os << "f_full = " << format_probability(check.f_full) << '\n';
    os << "diff = " << format_probability(check.diff) << '\n';
    return check.diff <= 1e-9 ? kOk : kRuntime;
}

int cmd_gen_vc(const std::string& path, double epsilon, bool bipartite, const Common& common)
{
    LabeledGraph lg = parse_edge_list_file(path);
    VcInstance inst = gen_vertex_cover_instance(lg.graph, epsilon);
    Sink sink(common.out);
    auto& os = sink.get();
    os << "# vertex cover reduction, epsilon " << format_probability(epsilon) << '\n';
    os << "# node labels:";
    for (std::size_t i = 0; i < lg.labels.size(); ++i) {
        os << ' ' << (i + 1) << '=' << lg.labels[i];
    }
    os << '\n';
    write_chain(os, bipartite ? inst.bipartite : inst.chain);
    return kOk;
}

int cmd_gen_synth(const SyntheticParams& params, const Common& common)
{
    SyntheticParams p = params;
    p.seed = common.seed;
    TagGraph g = gen_synthetic(p);
    Sink sink(common.out);
    write_bipartite(sink.get(), g);
    return kOk;
}

int cmd_sweep(ExperimentConfig cfg, const std::string& dataset, const std::string& methods,
              const Common& common)
{
    if (!dataset.empty()) {
        cfg.dataset = dataset;
    }
    if (!methods.empty()) {
        cfg.methods = split_list(methods);
    }
    cfg.seed = common.seed;
    if (!common.out.empty()) {
        cfg.output = common.out;
    }
    SweepResult result = run_sweep(cfg);
    if (!cfg.output) {
        write_sweep_csv(std::cout, result);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tag selection for reaching a target item in an absorbing Markov chain"};
    app.require_subcommand(1);

    Common common;
    std::string input;
    std::string set;
    std::size_t k = 1;
    std::string method = "greedy";
    std::size_t walks = 0;
    double epsilon = 0.1;
    bool bipartite = false;
    SyntheticParams synth;
    ExperimentConfig sweep_cfg;
    std::string dataset;
    std::string methods;
    double sweep_epsilon = 0.0;
    double sweep_sigma = 0.0;

    auto* validate = app.add_subcommand("validate", "Check a CHAIN or BIPARTITE file");
    validate->add_option("file", input)->required();
    add_common(validate, common);

    auto* evaluate = app.add_subcommand("evaluate", "Reach probability of a selection");
    evaluate->add_option("file", input)->required();
    evaluate->add_option("--set", set, "Comma-separated states (1-based) or tag names");
    evaluate->add_option("--mc", walks, "Also estimate by this many random walks");
    add_common(evaluate, common);

    auto* optimize = app.add_subcommand("optimize", "Select k states");
    optimize->add_option("file", input)->required();
    optimize->add_option("--k", k)->required()->check(CLI::PositiveNumber);
    optimize->add_option("--method", method)
        ->check(CLI::IsMember({"greedy", "lazy-greedy", "exhaustive", "pagerank", "degree-high",
                               "degree-low", "one-step", "random", "true-tags"}));
    add_common(optimize, common);

    auto* fold_check = app.add_subcommand("fold-check", "Compare folded and full chains");
    fold_check->add_option("file", input)->required();
    fold_check->add_option("--set", set, "Comma-separated tag names");
    add_common(fold_check, common);

    auto* gen_vc = app.add_subcommand("gen-vc", "Vertex-cover reduction from an edge list");
    gen_vc->add_option("file", input)->required();
    gen_vc->add_option("--epsilon", epsilon);
    gen_vc->add_flag("--bipartite", bipartite, "Emit the item-tag variant");
    add_common(gen_vc, common);

    auto* gen_synth = app.add_subcommand("gen-synth", "Random BIPARTITE dataset");
    gen_synth->add_option("--items", synth.n_items);
    gen_synth->add_option("--tags", synth.n_tags);
    gen_synth->add_option("--edges-per-item", synth.edges_per_item);
    gen_synth->add_option("--weight-exponent", synth.weight_exponent);
    gen_synth->add_option("--true-tags", synth.true_tags);
    gen_synth->add_option("--epsilon", synth.epsilon);
    gen_synth->add_option("--focal-quantile", synth.focal_weight_quantile,
                          "Item-weight quantile used as SIGMA_WEIGHT");
    add_common(gen_synth, common);

    auto* sweep = app.add_subcommand("sweep", "f for k = 1..k_max for every method, as CSV");
    sweep->add_option("--dataset", dataset, "BIPARTITE file (default: synthetic)");
    sweep->add_option("--k-max", sweep_cfg.k_max)->check(CLI::PositiveNumber);
    sweep->add_option("--methods", methods, "Comma-separated methods");
    sweep->add_option("--instances", sweep_cfg.instances)->check(CLI::PositiveNumber);
    auto* eps_opt = sweep->add_option("--epsilon", sweep_epsilon);
    auto* sigma_opt = sweep->add_option("--sigma-weight", sweep_sigma);
    sweep->add_option("--items", sweep_cfg.synthetic.n_items);
    sweep->add_option("--tags", sweep_cfg.synthetic.n_tags);
    sweep->add_option("--edges-per-item", sweep_cfg.synthetic.edges_per_item);
    sweep->add_option("--weight-exponent", sweep_cfg.synthetic.weight_exponent);
    sweep->add_option("--focal-quantile", sweep_cfg.synthetic.focal_weight_quantile);
    sweep->add_flag("--timing", sweep_cfg.timing, "Record wall times");
    add_common(sweep, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*validate) {
            return cmd_validate(input, common);
        }
        if (*evaluate) {
            return cmd_evaluate(input, set, walks, common);
        }
        if (*optimize) {
            return cmd_optimize(input, k, method, common);
        }
        if (*fold_check) {
            return cmd_fold_check(input, set, common);
        }
        if (*gen_vc) {
            return cmd_gen_vc(input, epsilon, bipartite, common);
        }
        if (*gen_synth) {
            return cmd_gen_synth(synth, common);
        }
        if (*sweep) {
            if (*eps_opt) {
                sweep_cfg.epsilon = sweep_epsilon;
            }
            if (*sigma_opt) {
                sweep_cfg.sigma_weight = sweep_sigma;
            }
            return cmd_sweep(sweep_cfg, dataset, methods, common);
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kValidation;
    } catch (const ValidationError& e) {
        std::cerr << "invalid chain:\n" << e.what() << '\n';
        return kValidation;
    } catch (const InvalidGraph& e) {
        std::cerr << "invalid graph: " << e.what() << '\n';
        return kValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kRuntime;
}

#include "reachmax/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "reachmax/baselines.hpp"
#include "reachmax/errors.hpp"
#include "reachmax/greedy.hpp"
#include "reachmax/io.hpp"
#include "reachmax/parallel.hpp"
#include "reachmax/random.hpp"
#include "reachmax/reach_objective.hpp"

namespace reachmax {

const std::vector<std::string>& sweep_methods()
{
    static const std::vector<std::string> methods = {
        "greedy", "lazy-greedy", "pagerank", "degree-high",
        "degree-low", "one-step", "random", "true-tags"};
    return methods;
}

void validate_config(const ExperimentConfig& cfg)
{
    if (cfg.k_max == 0) {
        throw std::invalid_argument("k_max must be at least 1");
    }
    if (cfg.instances == 0) {
        throw std::invalid_argument("instances must be at least 1");
    }
    if (cfg.methods.empty()) {
        throw std::invalid_argument("no methods requested");
    }
    const auto& known = sweep_methods();
    for (const auto& m : cfg.methods) {
        if (std::find(known.begin(), known.end(), m) == known.end()) {
            throw std::invalid_argument("unknown method " + m);
        }
    }
}

std::uint64_t config_hash(const ExperimentConfig& cfg)
{
    std::ostringstream os;
    os << "dataset=" << (cfg.dataset ? cfg.dataset->string() : std::string("-")) << ';';
    if (!cfg.dataset) {
        const auto& s = cfg.synthetic;
        os << "synthetic=" << s.n_items << ',' << s.n_tags << ',' << s.edges_per_item << ','
           << format_probability(s.weight_exponent) << ',' << s.true_tags << ','
           << format_probability(s.epsilon) << ',' << format_probability(s.focal_weight_quantile)
           << ';' << "instances=" << cfg.instances << ';';
    }
    os << "k_max=" << cfg.k_max << ';';
    os << "epsilon=" << (cfg.epsilon ? format_probability(*cfg.epsilon) : "-") << ';';
    os << "sigma_weight=" << (cfg.sigma_weight ? format_probability(*cfg.sigma_weight) : "-")
       << ';';
    os << "methods=";
    for (const auto& m : cfg.methods) {
        os << m << ',';
    }
    os << ";seed=" << cfg.seed;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : os.str()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

const SweepRow* SweepResult::find(const std::string& method, std::size_t k) const
{
    for (const auto& r : rows) {
        if (r.method == method && r.k == k) {
            return &r;
        }
    }
    return nullptr;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Context {
    const TagGraph& graph;
    const FoldedChain& folded;
    std::size_t k_max;
    std::uint64_t seed;
    bool timing;
};

// Rows of a greedy run to k_max, one per prefix.
void greedy_rows(const Context& ctx, bool lazy, std::vector<SweepRow>& rows)
{
    const auto name = lazy ? "lazy-greedy" : "greedy";
    GreedyOptions options;
    options.candidates = ctx.graph.resolved_candidates();
    options.threads = 1;
    const auto start = Clock::now();
    GreedyResult res = lazy ? lazy_greedy(ctx.folded.spec, ctx.k_max, options)
                            : simple_greedy(ctx.folded.spec, ctx.k_max, options);
    const double total_ms = ctx.timing ? elapsed_ms(start) : 0.0;
    const auto& trace = res.trace;
    std::vector<std::size_t> prefix;
    std::size_t evals = 0;
    for (std::size_t k = 1; k <= ctx.k_max; ++k) {
        if (k <= trace.chosen.size()) {
            prefix.push_back(trace.chosen[k - 1]);
        }
        if (k <= trace.evals_per_round.size()) {
            evals += trace.evals_per_round[k - 1];
        }
        SweepRow row{name, k, eval_reach(ctx.folded.spec, StateSet(prefix)).f, total_ms, evals};
        rows.push_back(std::move(row));
    }
}

// Rows of a selector that picks a k-set directly.
void selector_rows(const Context& ctx, const std::string& name,
                   const std::function<StateSet(std::size_t)>& select,
                   std::vector<SweepRow>& rows)
{
    for (std::size_t k = 1; k <= ctx.k_max; ++k) {
        const auto start = Clock::now();
        StateSet s = select(k);
        const double f = eval_reach(ctx.folded.spec, s).f;
        rows.push_back({name, k, f, ctx.timing ? elapsed_ms(start) : 0.0, 0});
    }
}

// Ranking-based selectors compute the ranking once and take prefixes.
std::function<StateSet(std::size_t)> from_ranking(std::vector<std::size_t> ranking)
{
    return [ranking = std::move(ranking)](std::size_t k) {
        std::vector<std::size_t> head(
            ranking.begin(),
            ranking.begin() + static_cast<std::ptrdiff_t>(std::min(k, ranking.size())));
        return StateSet(std::move(head));
    };
}

void method_rows(const Context& ctx, const std::string& method, std::vector<SweepRow>& rows)
{
    const TagGraph& g = ctx.graph;
    if (method == "greedy" || method == "lazy-greedy") {
        greedy_rows(ctx, method == "lazy-greedy", rows);
    } else if (method == "pagerank") {
        selector_rows(ctx, method, from_ranking(pagerank_ranking(g)), rows);
    } else if (method == "degree-high" || method == "degree-low") {
        selector_rows(ctx, method, from_ranking(degree_ranking(g, method == "degree-high")), rows);
    } else if (method == "one-step") {
        selector_rows(ctx, method, from_ranking(one_step_ranking(g)), rows);
    } else if (method == "random") {
        const std::uint64_t seed = splitmix64(ctx.seed ^ 0x72616e646f6dULL);
        selector_rows(ctx, method, [&g, seed](std::size_t k) { return random_select(g, k, seed); },
                      rows);
    } else if (method == "true-tags") {
        if (g.true_tags.empty()) {
            throw std::invalid_argument("dataset has no TRUE_TAGS");
        }
        selector_rows(ctx, method, [&g](std::size_t k) { return true_tags_select(g, k); }, rows);
    } else {
        throw std::invalid_argument("unknown method " + method);
    }
}

}  // namespace

std::vector<SweepRow> sweep_graph(const TagGraph& g, const std::vector<std::string>& methods,
                                  std::size_t k_max, std::uint64_t seed, bool timing,
                                  std::size_t threads, std::exception_ptr* error)
{
    const FoldedChain folded = fold(g);
    const Context ctx{g, folded, k_max, seed, timing};
    std::vector<std::vector<SweepRow>> per_method(methods.size());
    std::vector<std::exception_ptr> errors(methods.size());
    parallel_for(methods.size(), threads == 0 ? worker_count() : threads, [&](std::size_t m) {
        try {
            method_rows(ctx, methods[m], per_method[m]);
        } catch (...) {
            errors[m] = std::current_exception();
            per_method[m].push_back({methods[m], per_method[m].size() + 1, std::nullopt, 0.0, 0});
        }
    });
    std::vector<SweepRow> rows;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        if (errors[m] && error && !*error) {
            *error = errors[m];
        }
        rows.insert(rows.end(), per_method[m].begin(), per_method[m].end());
    }
    return rows;
}

SweepResult run_sweep(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    const std::uint64_t hash = config_hash(cfg);
    const std::size_t instances = cfg.dataset ? 1 : cfg.instances;

    struct Cell {
        double f_sum = 0.0;
        double ms = 0.0;
        std::size_t evals = 0;
        std::size_t count = 0;
        bool failed = false;
    };
    std::map<std::pair<std::size_t, std::size_t>, Cell> cells;
    std::exception_ptr error;

    for (std::size_t inst = 0; inst < instances; ++inst) {
        const std::uint64_t inst_seed = splitmix64(cfg.seed + inst);
        std::vector<SweepRow> rows;
        try {
            TagGraph g;
            if (cfg.dataset) {
                g = parse_bipartite_file(*cfg.dataset);
            } else {
                SyntheticParams params = cfg.synthetic;
                params.seed = inst_seed;
                g = gen_synthetic(params);
            }
            if (cfg.epsilon) {
                g.epsilon = *cfg.epsilon;
            }
            if (cfg.sigma_weight) {
                g.sigma_weight = *cfg.sigma_weight;
            }
            rows = sweep_graph(g, cfg.methods, cfg.k_max, inst_seed, cfg.timing, cfg.threads,
                               &error);
        } catch (...) {
            if (!error) {
                error = std::current_exception();
            }
            for (const auto& m : cfg.methods) {
                rows.push_back({m, 1, std::nullopt, 0.0, 0});
            }
        }
        for (const auto& r : rows) {
            auto m = static_cast<std::size_t>(
                std::find(cfg.methods.begin(), cfg.methods.end(), r.method) - cfg.methods.begin());
            Cell& c = cells[{m, r.k}];
            if (!r.f) {
                c.failed = true;
                continue;
            }
            c.f_sum += *r.f;
            c.ms += r.wall_time_ms;
            c.evals += r.n_evals;
            ++c.count;
        }
        if (error) {
            break;
        }
    }

    SweepResult result;
    result.metadata = {
        {"seed", std::to_string(cfg.seed)},
        {"config_hash", [hash] {
             char buf[19];
             std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
             return std::string(buf);
         }()},
        {"instances", std::to_string(instances)},
        {"source", cfg.dataset ? cfg.dataset->filename().string() : std::string("synthetic")},
    };
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        for (std::size_t k = 1; k <= cfg.k_max; ++k) {
            auto it = cells.find({m, k});
            const bool complete = it != cells.end() && !it->second.failed &&
                                  it->second.count == instances;
            if (!complete) {
                if (error) {
                    result.rows.push_back({cfg.methods[m], k, std::nullopt, 0.0, 0});
                }
                break;
            }
            const Cell& c = it->second;
            result.rows.push_back({cfg.methods[m], k,
                                   c.f_sum / static_cast<double>(instances), c.ms, c.evals});
        }
    }
    if (cfg.output) {
        write_sweep_csv_file(*cfg.output, result);
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result)
{
    for (const auto& [key, value] : result.metadata) {
        out << "# " << key << '=' << value << '\n';
    }
    out << "method,k,f,wall_time_ms,n_evals\n";
    char ms[64];
    for (const auto& r : result.rows) {
        if (!r.f) {
            out << r.method << ',' << r.k << ",FAILED,,\n";
            continue;
        }
        std::snprintf(ms, sizeof ms, "%.3f", r.wall_time_ms);
        out << r.method << ',' << r.k << ',' << format_probability(*r.f) << ',' << ms << ','
            << r.n_evals << '\n';
    }
}

void write_sweep_csv_file(const std::filesystem::path& path, const SweepResult& result)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_sweep_csv(out, result);
}

SweepResult read_sweep_csv(std::istream& in)
{
    SweepResult result;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            auto body = line.substr(1);
            body.erase(0, body.find_first_not_of(' '));
            auto eq = body.find('=');
            if (eq != std::string::npos) {
                result.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            }
            continue;
        }
        if (!header) {
            if (line != "method,k,f,wall_time_ms,n_evals") {
                throw ParseError(lineno, "unexpected CSV header");
            }
            header = true;
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream is(line);
        std::string field;
        while (std::getline(is, field, ',')) {
            fields.push_back(field);
        }
        if (line.back() == ',') {
            fields.emplace_back();
        }
        if (fields.size() != 5) {
            throw ParseError(lineno, "expected 5 fields");
        }
        SweepRow row;
        row.method = fields[0];
        try {
            row.k = std::stoul(fields[1]);
            if (fields[2] != "FAILED") {
                row.f = std::stod(fields[2]);
                row.wall_time_ms = std::stod(fields[3]);
                row.n_evals = std::stoul(fields[4]);
            }
        } catch (const std::logic_error&) {
            throw ParseError(lineno, "malformed number");
        }
        result.rows.push_back(std::move(row));
    }
    if (!header) {
        throw ParseError(lineno, "missing CSV header");
    }
    return result;
}

}  // namespace reachmax

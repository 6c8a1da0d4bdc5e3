#include <benchmark/benchmark.h>

#include "reachmax/greedy.hpp"
#include "reachmax/lup_solver.hpp"
#include "reachmax/oracle.hpp"
#include "reachmax/random.hpp"
#include "reachmax/reach_objective.hpp"
#include "reachmax/synthetic.hpp"
#include "reachmax/tag_graph.hpp"

using namespace reachmax;

namespace {

// Sparse chain with `degree` out-links per row and leak to both absorbers.
ChainSpec random_chain(std::size_t n, std::size_t degree, std::uint64_t seed)
{
    auto rng = stream_engine(seed, 0);
    ChainSpec spec;
    spec.n_transient = n;
    spec.absorbing = {"empty", "sigma"};
    spec.sigma = 1;
    spec.pi.assign(n, 1.0 / static_cast<double>(n));
    spec.q.resize(n);
    spec.q_bar.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        SparseRow bar;
        const double leave = 0.1;
        for (std::size_t d = 0; d < degree; ++d) {
            auto j = static_cast<std::uint32_t>(uniform_below(rng, n));
            bar.add(j, (1.0 - leave) / static_cast<double>(degree));
        }
        bar.add(spec.absorbing_column(0), leave);
        SparseRow linked = bar;
        linked.scale(0.5);
        linked.add(spec.sigma_column(), 0.5);
        spec.q_bar[i] = std::move(bar);
        spec.q[i] = std::move(linked);
    }
    return spec;
}

void BM_Factorize(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    ChainSpec spec = random_chain(n, 4, 7);
    SparseMatrix m = system_matrix(spec, StateSet{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(factorize(m));
    }
}
BENCHMARK(BM_Factorize)->Arg(250)->Arg(1000)->Arg(2000);

void BM_UpdatedSolve(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    ChainSpec spec = random_chain(n, 4, 7);
    ReachSolver solver(spec);
    for (std::size_t z = 0; z < 10; ++z) {
        solver.add(z * 13 % n);
    }
    std::size_t z = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.evaluate_with(z));
        z = (z + 1) % n;
    }
}
BENCHMARK(BM_UpdatedSolve)->Arg(250)->Arg(1000)->Arg(2000);

void BM_FreshSolve(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    ChainSpec spec = random_chain(n, 4, 7);
    StateSet s({0, 13, 26, 39, 52, 65, 78, 91, 104, 117});
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_reach(spec, s));
    }
}
BENCHMARK(BM_FreshSolve)->Arg(250)->Arg(1000)->Arg(2000);

void BM_DenseSolve(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    ChainSpec spec = random_chain(n, 4, 7);
    StateSet s({0, 13, 26});
    for (auto _ : state) {
        benchmark::DoNotOptimize(dense_solve_f(spec, s));
    }
}
BENCHMARK(BM_DenseSolve)->Arg(250)->Arg(500);

void BM_Greedy(benchmark::State& state)
{
    TagGraph g = gen_synthetic({300, 100, 3, 2.0, 1, 5, 0.1});
    ChainSpec spec = fold(g).spec;
    const bool lazy = state.range(0) != 0;
    std::size_t evals = 0;
    for (auto _ : state) {
        GreedyOptions options;
        options.threads = 1;
        auto r = lazy ? lazy_greedy(spec, 25, options) : simple_greedy(spec, 25, options);
        evals = r.trace.n_evals;
        benchmark::DoNotOptimize(r);
    }
    state.counters["n_evals"] = static_cast<double>(evals);
}
BENCHMARK(BM_Greedy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

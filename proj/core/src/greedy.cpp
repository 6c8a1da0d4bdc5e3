#include "reachmax/greedy.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "reachmax/parallel.hpp"
#include "reachmax/reach_objective.hpp"

namespace reachmax {

namespace {

constexpr double kBoundSlack = 1e-10;

std::vector<std::size_t> candidate_list(const ChainSpec& spec, const GreedyOptions& options)
{
    std::vector<std::size_t> out;
    if (options.candidates) {
        out = *options.candidates;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        if (!out.empty() && out.back() >= spec.n_transient) {
            throw std::out_of_range("candidate state out of range");
        }
    } else {
        out.resize(spec.n_transient);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = i;
        }
    }
    return out;
}

void check_budget(std::size_t k)
{
    if (k == 0) {
        throw std::invalid_argument("greedy budget must be at least 1");
    }
}

void record(GreedyTrace& trace, std::size_t z, double f_before, double f_after)
{
    trace.chosen.push_back(z);
    trace.gains.push_back(f_after - f_before);
    trace.f_values.push_back(f_after);
}

}  // namespace

GreedyResult simple_greedy(const ChainSpec& spec, std::size_t k, const GreedyOptions& options)
{
    check_budget(k);
    const auto candidates = candidate_list(spec, options);
    const std::size_t budget = std::min(k, candidates.size());
    const std::size_t workers = options.threads ? options.threads : worker_count();

    ReachSolver solver(spec, options.policy);
    GreedyResult result;
    GreedyTrace& trace = result.trace;
    trace.f_initial = solver.current().f;

    for (std::size_t round = 0; round < budget; ++round) {
        std::vector<std::size_t> remaining;
        for (std::size_t z : candidates) {
            if (!solver.selection().contains(z)) {
                remaining.push_back(z);
            }
        }
        std::vector<double> values(remaining.size());
        parallel_for(remaining.size(), workers, [&](std::size_t idx) {
            values[idx] = solver.evaluate_with(remaining[idx]).f;
        });
        trace.n_evals += remaining.size();
        trace.n_updates += remaining.size();
        trace.evals_per_round.push_back(remaining.size());

        const double f_before = solver.current().f;
        std::size_t best = 0;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t idx = 0; idx < remaining.size(); ++idx) {
            double gain = values[idx] - f_before;
            if (gain > best_gain) {
                best_gain = gain;
                best = idx;
            }
        }
        if (best_gain <= kSaturationGain) {
            trace.unused_budget = budget - round;
            break;
        }
        solver.add(remaining[best]);
        ++trace.n_updates;
        record(trace, remaining[best], f_before, solver.current().f);
    }
    result.selection = solver.selection();
    return result;
}

GreedyResult lazy_greedy(const ChainSpec& spec, std::size_t k, const GreedyOptions& options)
{
    check_budget(k);
    const auto candidates = candidate_list(spec, options);
    const std::size_t budget = std::min(k, candidates.size());
    constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

    ReachSolver solver(spec, options.policy);
    GreedyResult result;
    GreedyTrace& trace = result.trace;
    trace.f_initial = solver.current().f;

    LazyQueue queue;
    std::vector<std::size_t> fresh_round(spec.n_transient, kNever);
    std::size_t sweep_evals = 0;
    if (options.initial_sweep) {
        for (std::size_t z : candidates) {
            queue.push(solver.evaluate_with(z).f - trace.f_initial, z);
            fresh_round[z] = 0;
        }
        sweep_evals = candidates.size();
        trace.n_evals += sweep_evals;
        trace.n_updates += sweep_evals;
    } else {
        for (std::size_t z : candidates) {
            queue.push(std::numeric_limits<double>::infinity(), z);
        }
    }

    for (std::size_t round = 0; round < budget; ++round) {
        const double f_before = solver.current().f;
        std::size_t evals = 0;
        while (true) {
            LazyQueue::Entry top = queue.top();
            if (fresh_round[top.state] == round) {
                break;
            }
            queue.pop();
            double gain = solver.evaluate_with(top.state).f - f_before;
            ++evals;
            queue.push(gain, top.state);
            fresh_round[top.state] = round;
        }
        trace.n_evals += evals;
        trace.n_updates += evals;
        trace.evals_per_round.push_back(evals + (round == 0 ? sweep_evals : 0));

        const LazyQueue::Entry accepted = queue.top();
        if (options.verify_lazy) {
            std::size_t best = kNever;
            double best_gain = -std::numeric_limits<double>::infinity();
            for (std::size_t z : candidates) {
                if (solver.selection().contains(z)) {
                    continue;
                }
                double gain = solver.evaluate_with(z).f - f_before;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = z;
                }
            }
            if (best != accepted.state && best_gain > accepted.bound + kBoundSlack) {
                ++trace.wrong_choices;
            }
            // Every queued key must still bound its true gain.
            auto copy = queue;
            while (!copy.empty()) {
                auto e = copy.top();
                copy.pop();
                double gain = solver.evaluate_with(e.state).f - f_before;
                if (e.bound < gain - kBoundSlack) {
                    ++trace.bound_violations;
                }
            }
        }

        if (accepted.bound <= kSaturationGain) {
            trace.unused_budget = budget - round;
            break;
        }
        queue.pop();
        solver.add(accepted.state);
        ++trace.n_updates;
        record(trace, accepted.state, f_before, solver.current().f);
    }
    result.selection = solver.selection();
    return result;
}

}  // namespace reachmax

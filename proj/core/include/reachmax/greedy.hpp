#pragma once

#include <cstddef>
#include <optional>
#include <queue>
#include <vector>

#include "reachmax/chain_model.hpp"
#include "reachmax/lup_solver.hpp"

namespace reachmax {

/// Gains at or below this end the run early; the objective is saturated.
inline constexpr double kSaturationGain = 1e-12;

struct GreedyOptions {
    /// States eligible for selection; all transient states when empty.
    std::optional<std::vector<std::size_t>> candidates;
    /// Workers for the plain greedy candidate sweep; 0 reads REACHMAX_THREADS.
    std::size_t threads = 0;
    UpdatePolicy policy;
    /// Lazy greedy only: evaluate every candidate at each acceptance and count
    /// disagreements with the queue. Audit evaluations are not counted in n_evals.
    bool verify_lazy = false;
    /// Lazy greedy only: evaluate every candidate before the first pop instead
    /// of starting from infinite bounds.
    bool initial_sweep = false;
};

struct GreedyTrace {
    std::vector<std::size_t> chosen;
    double f_initial = 0.0;
    std::vector<double> f_values;  ///< f after each selection
    std::vector<double> gains;
    std::vector<std::size_t> evals_per_round;
    std::size_t n_evals = 0;
    std::size_t n_updates = 0;
    std::size_t unused_budget = 0;
    /// Filled when verify_lazy is set.
    std::size_t wrong_choices = 0;
    std::size_t bound_violations = 0;
};

struct GreedyResult {
    StateSet selection;
    GreedyTrace trace;
};

/// Max-priority queue of stale upper bounds on marginal gains. Larger bounds
/// pop first; equal bounds pop the lower state index first.
class LazyQueue {
public:
    struct Entry {
        double bound;
        std::size_t state;
    };

    void push(double bound, std::size_t state) { heap_.push(Entry{bound, state}); }
    const Entry& top() const { return heap_.top(); }
    void pop() { heap_.pop(); }
    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }

private:
    struct Lower {
        bool operator()(const Entry& a, const Entry& b) const
        {
            if (a.bound != b.bound) {
                return a.bound < b.bound;
            }
            return a.state > b.state;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Lower> heap_;
};

/// Each round evaluates f(S + {z}) for every remaining candidate and keeps the
/// argmax, lowest index on ties. Candidates of a round are evaluated in parallel.
GreedyResult simple_greedy(const ChainSpec& spec, std::size_t k, const GreedyOptions& options = {});

/// CELF: pops the largest stale bound, refreshes it, and accepts a state once
/// it is on top with a bound refreshed in the current round. Same output as
/// simple_greedy with fewer evaluations.
GreedyResult lazy_greedy(const ChainSpec& spec, std::size_t k, const GreedyOptions& options = {});

}  // namespace reachmax

#pragma once

#include <cstddef>
#include <vector>

#include "reachmax/chain_model.hpp"
#include "reachmax/lup_solver.hpp"

namespace reachmax {

/// Per-state probabilities of ever being absorbed at the target, and their
/// pi-weighted total.
struct ReachResult {
    std::vector<double> c;
    double f = 0.0;
    /// ||(I - A) c - b||_inf before clamping.
    double residual = 0.0;
    /// Largest amount any c_i was moved to bring it into [0, 1]. Values above
    /// kClampWarning deserve a warning.
    double clamp_excess = 0.0;
};

inline constexpr double kClampWarning = 1e-9;

/// Keeps the factorization of I - A(S) for a current selection S so that
/// neighbouring selections S + {z} cost one row replacement.
class ReachSolver {
public:
    explicit ReachSolver(const ChainSpec& spec, UpdatePolicy policy = {});
    ReachSolver(const ChainSpec& spec, const StateSet& selection, UpdatePolicy policy = {});

    const ChainSpec& spec() const noexcept { return *spec_; }
    const StateSet& selection() const noexcept { return selection_; }
    const LupFactors& factors() const noexcept { return factors_; }
    const ReachResult& current() const noexcept { return current_; }

    /// Result for selection + {z}, computed from the current factors with one
    /// row replacement. Does not change the solver; safe to call concurrently.
    ReachResult evaluate_with(std::size_t z) const;

    /// Commits z to the selection via a row replacement.
    void add(std::size_t z);

    /// Refactors from scratch for `selection`.
    void reset(const StateSet& selection);

private:
    ReachResult finish(std::vector<double> c, const StateSet& s, std::size_t extra) const;

    const ChainSpec* spec_;
    StateSet selection_;
    LupFactors factors_;
    std::vector<double> b_;
    ReachResult current_;
};

/// f(S) by a fresh factorization.
ReachResult eval_reach(const ChainSpec& spec, const StateSet& s);

/// f(S) reusing `solver`: states of S missing from the solver's selection are
/// added by row replacement; if the solver holds states outside S it is reset.
ReachResult eval_reach(const ChainSpec& spec, const StateSet& s, ReachSolver& solver);

/// sum_i pi_i * rho_{i,target}(S), the probability of absorption in one step.
double one_step_value(const ChainSpec& spec, const StateSet& s);

/// f(S + {z}) - f(S), always through a row replacement on the factors of S.
double marginal_gain(const ChainSpec& spec, const StateSet& s, std::size_t z,
                     ReachSolver& solver);

/// Probability of absorption at the target within `steps` steps, per state:
/// the partial sum of A^t b for t < steps.
std::vector<double> truncated_reach(const ChainSpec& spec, const StateSet& s, std::size_t steps);

}  // namespace reachmax

#include "reachmax/reach_objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reachmax {

ReachSolver::ReachSolver(const ChainSpec& spec, UpdatePolicy policy)
    : ReachSolver(spec, StateSet{}, policy)
{
}

ReachSolver::ReachSolver(const ChainSpec& spec, const StateSet& selection, UpdatePolicy policy)
    : spec_(&spec),
      selection_(selection),
      factors_(factorize(system_matrix(spec, selection), policy)),
      b_(target_vector(spec, selection))
{
    current_ = finish(factors_.solve(b_), selection_, spec.n_transient);
}

ReachResult ReachSolver::finish(std::vector<double> c, const StateSet& s, std::size_t extra) const
{
    const ChainSpec& spec = *spec_;
    const std::size_t n = spec.n_transient;
    const std::uint32_t sigma = spec.sigma_column();
    ReachResult r;
    for (std::size_t i = 0; i < n; ++i) {
        bool linked = i == extra || s.contains(i);
        const SparseRow& row = linked ? spec.q[i] : spec.q_bar[i];
        double acc = c[i];
        for (const auto& e : row) {
            if (e.col < n) {
                acc -= e.value * c[e.col];
            } else if (linked && e.col == sigma) {
                acc -= e.value;
            }
        }
        r.residual = std::max(r.residual, std::abs(acc));
    }
    for (double& ci : c) {
        double clamped = std::clamp(ci, 0.0, 1.0);
        r.clamp_excess = std::max(r.clamp_excess, std::abs(clamped - ci));
        ci = clamped;
    }
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f += spec.pi[i] * c[i];
    }
    r.f = f;
    r.c = std::move(c);
    return r;
}

ReachResult ReachSolver::evaluate_with(std::size_t z) const
{
    if (z >= spec_->n_transient) {
        throw std::out_of_range("state " + std::to_string(z) + " is not a transient state");
    }
    if (selection_.contains(z)) {
        return current_;
    }
    LupFactors updated = factors_.replace_row(z, system_row(*spec_, z, true));
    std::vector<double> b = b_;
    b[z] = spec_->q[z].get(spec_->sigma_column());
    return finish(updated.solve(b), selection_, z);
}

void ReachSolver::add(std::size_t z)
{
    if (z >= spec_->n_transient) {
        throw std::out_of_range("state " + std::to_string(z) + " is not a transient state");
    }
    if (!selection_.insert(z)) {
        return;
    }
    factors_ = factors_.replace_row(z, system_row(*spec_, z, true));
    b_[z] = spec_->q[z].get(spec_->sigma_column());
    current_ = finish(factors_.solve(b_), selection_, spec_->n_transient);
}

void ReachSolver::reset(const StateSet& selection)
{
    factors_ = factorize(system_matrix(*spec_, selection), factors_.policy());
    selection_ = selection;
    b_ = target_vector(*spec_, selection);
    current_ = finish(factors_.solve(b_), selection_, spec_->n_transient);
}

ReachResult eval_reach(const ChainSpec& spec, const StateSet& s)
{
    ReachSolver solver(spec, s);
    return solver.current();
}

ReachResult eval_reach(const ChainSpec& spec, const StateSet& s, ReachSolver& solver)
{
    if (&solver.spec() != &spec) {
        throw std::invalid_argument("eval_reach: solver was built for a different chain");
    }
    bool subset = std::includes(s.begin(), s.end(), solver.selection().begin(),
                                solver.selection().end());
    if (!subset) {
        solver.reset(s);
        return solver.current();
    }
    for (std::size_t z : s) {
        solver.add(z);
    }
    return solver.current();
}

double one_step_value(const ChainSpec& spec, const StateSet& s)
{
    check_selection(spec, s);
    const std::uint32_t sigma = spec.sigma_column();
    double v = 0.0;
    for (std::size_t i : s) {
        v += spec.pi[i] * spec.q[i].get(sigma);
    }
    return v;
}

double marginal_gain(const ChainSpec& spec, const StateSet& s, std::size_t z,
                     ReachSolver& solver)
{
    if (s.contains(z)) {
        throw std::invalid_argument("marginal_gain: state already selected");
    }
    double base = eval_reach(spec, s, solver).f;
    return solver.evaluate_with(z).f - base;
}

std::vector<double> truncated_reach(const ChainSpec& spec, const StateSet& s, std::size_t steps)
{
    AssembledChain chain = assemble(spec, s);
    std::vector<double> c(spec.n_transient, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
        std::vector<double> next = chain.a.multiply(c);
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] += chain.b[i];
        }
        c = std::move(next);
    }
    return c;
}

}  // namespace reachmax

#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "reachmax/chain_model.hpp"

namespace reachmax {

// Ground truth that shares no code with the sparse solver path.

/// c(S) by dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve_c(const ChainSpec& spec, const StateSet& s);
double dense_solve_f(const ChainSpec& spec, const StateSet& s);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t walks = 0;
    std::size_t absorbed = 0;
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
};

/// Simulates walks from pi under rho(S) and counts absorption at the target
/// within `horizon` steps (0 means 100 * n). Walks still transient at the
/// horizon count as not absorbed, so the estimate is biased low by at most the
/// mass left after `horizon` steps. Walks are split into fixed blocks with
/// their own sub-streams, so the result does not depend on `workers`.
McEstimate monte_carlo_f(const ChainSpec& spec, const StateSet& s, std::size_t n_walks,
                         std::size_t horizon, std::uint64_t seed, std::size_t workers = 1);

/// Best k-subset by enumeration with dense solves; ties keep the
/// lexicographically smallest set. Throws CombinatorialLimit when C(n, k) > limit.
std::pair<StateSet, double> exhaustive_opt(const ChainSpec& spec, std::size_t k,
                                           std::size_t limit = 1'000'000);

/// C(n, k), saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

/// Simple undirected graph on nodes 0..n-1.
struct SimpleGraph {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    std::vector<std::vector<std::size_t>> adjacency() const;
    bool is_vertex_cover(const StateSet& nodes) const;
};

/// Reduction from vertex cover. In `chain`, node i is transient state i whose
/// linked row goes to the target with probability 1 and whose unlinked row
/// leaves with probability epsilon or moves to a uniform neighbour. In
/// `bipartite`, tag states 0..n-1 move uniformly to one item state per directed
/// edge (i, j), which moves to tag j with probability 1 - epsilon or leaves.
/// Both start uniformly over the node (tag) states.
struct VcInstance {
    SimpleGraph graph;
    double epsilon = 0.0;
    ChainSpec chain;
    ChainSpec bipartite;

    double threshold(std::size_t k) const;
};

/// Throws InvalidGraph for self-loops, repeated edges, isolated nodes or epsilon outside (0, 1).
VcInstance gen_vertex_cover_instance(const SimpleGraph& g, double epsilon);

/// 1 - ((n - k) / n) * epsilon: f of any size-k vertex cover.
double vc_threshold(std::size_t n, std::size_t k, double epsilon);

}  // namespace reachmax

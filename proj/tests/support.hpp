#pragma once

// Instance generators shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "reachmax/chain_model.hpp"
#include "reachmax/oracle.hpp"
#include "reachmax/random.hpp"
#include "reachmax/tag_graph.hpp"

namespace testing {

using namespace reachmax;

inline std::filesystem::path fixture_dir()
{
    return REACHMAX_FIXTURES;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

inline std::size_t below(std::mt19937_64& rng, std::size_t bound)
{
    return static_cast<std::size_t>(uniform_below(rng, bound));
}

// t1 loops with 0.5 or leaves; linked, it reaches the target w.p. 0.2 per step.
inline ChainSpec chain_e1()
{
    ChainSpec s;
    s.n_transient = 1;
    s.absorbing = {"empty", "sigma"};
    s.sigma = 1;
    s.pi = {1.0};
    s.q_bar = {SparseRow({{0, 0.5}, {1, 0.5}})};
    s.q = {SparseRow({{0, 0.4}, {1, 0.4}, {2, 0.2}})};
    return s;
}

// t1 -> t2 -> empty unlinked; every linked row goes to the target.
inline ChainSpec chain_e2()
{
    ChainSpec s;
    s.n_transient = 2;
    s.absorbing = {"empty", "sigma"};
    s.sigma = 1;
    s.pi = {1.0, 0.0};
    s.q_bar = {SparseRow({{1, 1.0}}), SparseRow({{2, 1.0}})};
    s.q = {SparseRow({{3, 1.0}}), SparseRow({{3, 1.0}})};
    return s;
}

// One tag "a" with one item "i" of weight 1.
inline TagGraph graph_e3()
{
    TagGraph g;
    g.tags = {"a"};
    g.items = {"i"};
    g.edges = {{0, 0, 1.0}};
    g.epsilon = 0.1;
    g.sigma_weight = 1.0;
    return g;
}

struct ChainOptions {
    std::size_t min_n = 1;
    std::size_t max_n = 30;
    std::size_t max_degree = 4;
    /// Extra absorbing competitors beyond "empty".
    bool extra_absorber = true;
};

/// Valid chain satisfying the domination condition: linked rows scale each
/// unlinked entry by a factor in [0, 1] and send the rest to the target.
/// State 0 always leaks to an absorber; a state that does not leak links to a
/// lower-numbered state, so every state reaches absorption.
inline ChainSpec random_chain(std::mt19937_64& rng, const ChainOptions& o = {})
{
    ChainSpec s;
    const std::size_t n = o.min_n + below(rng, o.max_n - o.min_n + 1);
    s.n_transient = n;
    s.absorbing = {"empty", "sigma"};
    if (o.extra_absorber && below(rng, 2) == 0) {
        s.absorbing.push_back("other");
    }
    s.sigma = 1;
    const std::size_t r = s.absorbing.size();
    s.q.resize(n);
    s.q_bar.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> w(n + r, 0.0);
        const std::size_t degree = below(rng, o.max_degree + 1);
        for (std::size_t d = 0; d < degree; ++d) {
            w[below(rng, n)] += uniform(rng, 0.1, 1.0);
        }
        const bool leaks = i == 0 || below(rng, 2) == 0;
        if (leaks) {
            w[n] += uniform(rng, 0.05, 1.0);
            if (r == 3 && below(rng, 2) == 0) {
                w[n + 2] += uniform(rng, 0.05, 1.0);
            }
        } else {
            w[below(rng, i)] += uniform(rng, 0.1, 1.0);
        }
        double total = 0.0;
        for (double v : w) {
            total += v;
        }
        std::vector<SparseEntry> bar;
        std::vector<SparseEntry> linked;
        double to_sigma = 0.0;
        const bool same_row = below(rng, 10) == 0;
        for (std::size_t j = 0; j < n + r; ++j) {
            if (w[j] == 0.0) {
                continue;
            }
            const double p = w[j] / total;
            bar.push_back({static_cast<std::uint32_t>(j), p});
            const double keep = same_row ? 1.0 : uniform(rng, 0.0, 1.0);
            if (keep * p > 0.0) {
                linked.push_back({static_cast<std::uint32_t>(j), keep * p});
            }
            to_sigma += p - keep * p;
        }
        if (to_sigma > 0.0) {
            linked.push_back({s.sigma_column(), to_sigma});
        }
        s.q_bar[i] = SparseRow(std::move(bar));
        s.q[i] = SparseRow(std::move(linked));
    }
    // Initial mass on a random non-empty subset.
    s.pi.assign(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0 || below(rng, 2) == 0) {
            s.pi[i] = uniform(rng, 0.1, 1.0);
            total += s.pi[i];
        }
    }
    for (double& p : s.pi) {
        p /= total;
    }
    return s;
}

inline StateSet random_subset(std::mt19937_64& rng, std::size_t n, std::size_t max_size)
{
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) {
        all[i] = i;
    }
    const std::size_t size = below(rng, std::min(max_size, n) + 1);
    for (std::size_t i = 0; i < size; ++i) {
        std::swap(all[i], all[i + below(rng, n - i)]);
    }
    all.resize(size);
    return StateSet(std::move(all));
}

struct GraphOptions {
    std::size_t max_items = 50;
    std::size_t max_tags = 30;
    std::size_t max_edges_per_item = 4;
    bool item_links = false;
    bool random_pi = false;
    bool random_candidates = false;
};

/// Random valid tag graph: each item gets 1..max_edges_per_item tags, and a
/// tag left without items is attached to a random item.
inline TagGraph random_tag_graph(std::mt19937_64& rng, const GraphOptions& o = {})
{
    TagGraph g;
    const std::size_t n_items = 1 + below(rng, o.max_items);
    const std::size_t n_tags = 1 + below(rng, o.max_tags);
    for (std::size_t j = 0; j < n_tags; ++j) {
        g.tags.push_back("t" + std::to_string(j));
    }
    for (std::size_t i = 0; i < n_items; ++i) {
        g.items.push_back("i" + std::to_string(i));
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<bool> used(n_tags, false);
    for (std::size_t i = 0; i < n_items; ++i) {
        const std::size_t d = 1 + below(rng, std::min(o.max_edges_per_item, n_tags));
        for (std::size_t e = 0; e < d; ++e) {
            const std::size_t j = below(rng, n_tags);
            if (seen.emplace(i, j).second) {
                g.edges.push_back({i, j, uniform(rng, 0.2, 5.0)});
                used[j] = true;
            }
        }
    }
    for (std::size_t j = 0; j < n_tags; ++j) {
        if (!used[j]) {
            const std::size_t i = below(rng, n_items);
            seen.emplace(i, j);
            g.edges.push_back({i, j, uniform(rng, 0.2, 5.0)});
        }
    }
    g.epsilon = uniform(rng, 0.05, 0.3);
    if (below(rng, 2) == 0) {
        g.sigma_weight = uniform(rng, 0.2, 5.0);
    }
    if (o.item_links && n_items > 1) {
        const std::size_t links = below(rng, n_items);
        std::set<std::pair<std::size_t, std::size_t>> seen_links;
        for (std::size_t l = 0; l < links; ++l) {
            const std::size_t a = below(rng, n_items);
            const std::size_t b = below(rng, n_items);
            if (a != b && seen_links.emplace(a, b).second) {
                g.item_links.push_back({a, b, uniform(rng, 0.1, 2.0)});
            }
        }
    }
    if (o.random_candidates) {
        for (std::size_t j = 0; j < n_tags; ++j) {
            if (j == 0 || below(rng, 2) == 0) {
                g.candidates.push_back(j);
            }
        }
    }
    if (o.random_pi) {
        g.pi_tags.assign(n_tags, 0.0);
        double total = 0.0;
        for (auto& p : g.pi_tags) {
            p = below(rng, 3) == 0 ? 0.0 : uniform(rng, 0.1, 1.0);
            total += p;
        }
        if (total == 0.0) {
            g.pi_tags[0] = total = 1.0;
        }
        for (auto& p : g.pi_tags) {
            p /= total;
        }
    }
    return g;
}

/// Random simple graph on n >= 2 nodes without isolated nodes.
inline SimpleGraph random_simple_graph(std::mt19937_64& rng, std::size_t n, double density)
{
    SimpleGraph g;
    g.n = n;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (uniform01(rng) < density) {
                seen.emplace(u, v);
            }
        }
    }
    std::vector<bool> touched(n, false);
    for (const auto& [u, v] : seen) {
        touched[u] = touched[v] = true;
    }
    for (std::size_t u = 0; u < n; ++u) {
        if (!touched[u]) {
            std::size_t v = below(rng, n - 1);
            if (v >= u) {
                ++v;
            }
            seen.emplace(std::min(u, v), std::max(u, v));
            touched[u] = touched[v] = true;
        }
    }
    g.edges.assign(seen.begin(), seen.end());
    return g;
}

}  // namespace testing

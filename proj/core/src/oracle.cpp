#include "reachmax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "reachmax/errors.hpp"
#include "reachmax/parallel.hpp"
#include "reachmax/random.hpp"

namespace reachmax {

std::vector<double> dense_solve_c(const ChainSpec& spec, const StateSet& s)
{
    const std::size_t n = spec.n_transient;
    const std::uint32_t sigma = spec.sigma_column();
    for (std::size_t i : s) {
        if (i >= n) {
            throw std::out_of_range("state outside the chain");
        }
    }
    // Augmented [I - A | b], row-major with n + 1 columns.
    const std::size_t w = n + 1;
    std::vector<double> m(n * w, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool linked = s.contains(i);
        m[i * w + i] = 1.0;
        for (const auto& e : (linked ? spec.q[i] : spec.q_bar[i])) {
            if (e.col < n) {
                m[i * w + e.col] -= e.value;
            } else if (e.col == sigma && linked) {
                m[i * w + n] += e.value;
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(m[i * w + k]) > std::abs(m[p * w + k])) {
                p = i;
            }
        }
        if (std::abs(m[p * w + k]) < 1e-12) {
            throw SingularMatrix(k, m[p * w + k]);
        }
        if (p != k) {
            for (std::size_t j = k; j < w; ++j) {
                std::swap(m[k * w + j], m[p * w + j]);
            }
        }
        const double pivot = m[k * w + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const double factor = m[i * w + k] / pivot;
            if (factor == 0.0) {
                continue;
            }
            for (std::size_t j = k; j < w; ++j) {
                m[i * w + j] -= factor * m[k * w + j];
            }
        }
    }
    std::vector<double> c(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = m[i * w + n];
        for (std::size_t j = i + 1; j < n; ++j) {
            acc -= m[i * w + j] * c[j];
        }
        c[i] = acc / m[i * w + i];
    }
    return c;
}

double dense_solve_f(const ChainSpec& spec, const StateSet& s)
{
    auto c = dense_solve_c(spec, s);
    double f = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        f += spec.pi[i] * c[i];
    }
    return f;
}

namespace {

// Inverse-CDF sampling table for one row.
struct RowSampler {
    std::vector<double> cumulative;
    std::vector<std::uint32_t> target;

    std::uint32_t draw(double u) const
    {
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
        return target[std::min(idx, target.size() - 1)];
    }
};

RowSampler make_sampler(const SparseRow& row)
{
    RowSampler s;
    double acc = 0.0;
    for (const auto& e : row) {
        if (e.value <= 0.0) {
            continue;
        }
        acc += e.value;
        s.cumulative.push_back(acc);
        s.target.push_back(e.col);
    }
    return s;
}

constexpr std::size_t kWalkBlock = 4096;

}  // namespace

McEstimate monte_carlo_f(const ChainSpec& spec, const StateSet& s, std::size_t n_walks,
                         std::size_t horizon, std::uint64_t seed, std::size_t workers)
{
    if (n_walks == 0) {
        throw std::invalid_argument("monte_carlo_f needs at least one walk");
    }
    const std::size_t n = spec.n_transient;
    if (horizon == 0) {
        horizon = 100 * n;
    }
    const std::uint32_t sigma = spec.sigma_column();

    std::vector<RowSampler> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows.push_back(make_sampler(s.contains(i) ? spec.q[i] : spec.q_bar[i]));
    }
    SparseRow start_row;
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.pi[i] > 0.0) {
            start_row.set(static_cast<std::uint32_t>(i), spec.pi[i]);
        }
    }
    const RowSampler start = make_sampler(start_row);

    const std::size_t blocks = (n_walks + kWalkBlock - 1) / kWalkBlock;
    std::vector<std::size_t> hits(blocks, 0);
    parallel_for(blocks, workers, [&](std::size_t b) {
        auto rng = stream_engine(seed, b);
        const std::size_t count = std::min(kWalkBlock, n_walks - b * kWalkBlock);
        std::size_t absorbed = 0;
        for (std::size_t w = 0; w < count; ++w) {
            std::uint32_t state = start.draw(uniform01(rng));
            for (std::size_t t = 0; t < horizon && state < n; ++t) {
                const RowSampler& r = rows[state];
                if (r.target.empty()) {
                    break;
                }
                state = r.draw(uniform01(rng));
            }
            if (state == sigma) {
                ++absorbed;
            }
        }
        hits[b] = absorbed;
    });

    McEstimate est;
    est.walks = n_walks;
    est.horizon = horizon;
    est.seed = seed;
    for (std::size_t h : hits) {
        est.absorbed += h;
    }
    const double p = static_cast<double>(est.absorbed) / static_cast<double>(n_walks);
    est.estimate = p;
    est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n_walks));
    return est;
}

std::size_t binomial(std::size_t n, std::size_t k)
{
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t num = n - k + i;
        if (r > std::numeric_limits<std::size_t>::max() / num) {
            return std::numeric_limits<std::size_t>::max();
        }
        r = r * num / i;
    }
    return r;
}

std::pair<StateSet, double> exhaustive_opt(const ChainSpec& spec, std::size_t k,
                                           std::size_t limit)
{
    const std::size_t n = spec.n_transient;
    k = std::min(k, n);
    if (binomial(n, k) > limit) {
        throw CombinatorialLimit("C(" + std::to_string(n) + ", " + std::to_string(k) +
                                 ") exceeds the enumeration limit");
    }
    std::vector<std::size_t> combo(k);
    for (std::size_t i = 0; i < k; ++i) {
        combo[i] = i;
    }
    StateSet best_set;
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
        StateSet s(combo);
        double f = dense_solve_f(spec, s);
        if (f > best) {
            best = f;
            best_set = std::move(s);
        }
        // Next combination in lexicographic order.
        std::size_t i = k;
        while (i > 0 && combo[i - 1] == n - k + i - 1) {
            --i;
        }
        if (i == 0) {
            break;
        }
        ++combo[i - 1];
        for (std::size_t j = i; j < k; ++j) {
            combo[j] = combo[j - 1] + 1;
        }
    }
    return {best_set, best};
}

std::vector<std::vector<std::size_t>> SimpleGraph::adjacency() const
{
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
    }
    return adj;
}

bool SimpleGraph::is_vertex_cover(const StateSet& nodes) const
{
    return std::all_of(edges.begin(), edges.end(), [&nodes](const auto& e) {
        return nodes.contains(e.first) || nodes.contains(e.second);
    });
}

double vc_threshold(std::size_t n, std::size_t k, double epsilon)
{
    if (n == 0 || k > n) {
        throw std::invalid_argument("vc_threshold needs 0 <= k <= n, n > 0");
    }
    return 1.0 - (static_cast<double>(n - k) / static_cast<double>(n)) * epsilon;
}

double VcInstance::threshold(std::size_t k) const
{
    return vc_threshold(graph.n, k, epsilon);
}

VcInstance gen_vertex_cover_instance(const SimpleGraph& g, double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvalidGraph("epsilon must lie in (0, 1)");
    }
    if (g.n == 0) {
        throw InvalidGraph("graph has no nodes");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [u, v] : g.edges) {
        if (u >= g.n || v >= g.n) {
            throw InvalidGraph("edge endpoint out of range");
        }
        if (u == v) {
            throw InvalidGraph("self-loop at node " + std::to_string(u));
        }
        if (!seen.emplace(std::min(u, v), std::max(u, v)).second) {
            throw InvalidGraph("repeated edge");
        }
    }
    const auto adj = g.adjacency();
    for (std::size_t i = 0; i < g.n; ++i) {
        if (adj[i].empty()) {
            throw InvalidGraph("isolated node " + std::to_string(i));
        }
    }

    VcInstance inst;
    inst.graph = g;
    inst.epsilon = epsilon;

    ChainSpec& chain = inst.chain;
    chain.n_transient = g.n;
    chain.absorbing = {"empty", "sigma"};
    chain.sigma = 1;
    chain.pi.assign(g.n, 1.0 / static_cast<double>(g.n));
    chain.q.resize(g.n);
    chain.q_bar.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        chain.q[i] = SparseRow({{chain.sigma_column(), 1.0}});
        std::vector<SparseEntry> bar;
        const double share = (1.0 - epsilon) / static_cast<double>(adj[i].size());
        for (std::size_t j : adj[i]) {
            bar.push_back({static_cast<std::uint32_t>(j), share});
        }
        bar.push_back({chain.absorbing_column(0), epsilon});
        chain.q_bar[i] = SparseRow(std::move(bar));
    }

    // One item state per directed edge, numbered after the tags in
    // (source, target) order.
    ChainSpec& bip = inst.bipartite;
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j : adj[i]) {
            arcs.emplace_back(i, j);
        }
    }
    bip.n_transient = g.n + arcs.size();
    bip.absorbing = {"empty", "sigma"};
    bip.sigma = 1;
    bip.pi.assign(bip.n_transient, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) {
        bip.pi[i] = 1.0 / static_cast<double>(g.n);
    }
    bip.q.resize(bip.n_transient);
    bip.q_bar.resize(bip.n_transient);
    std::vector<std::vector<SparseEntry>> tag_rows(g.n);
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        const auto [i, j] = arcs[a];
        const auto item = static_cast<std::uint32_t>(g.n + a);
        tag_rows[i].push_back({item, 1.0 / static_cast<double>(adj[i].size())});
        SparseRow row({{static_cast<std::uint32_t>(j), 1.0 - epsilon},
                       {bip.absorbing_column(0), epsilon}});
        bip.q_bar[item] = row;
        bip.q[item] = std::move(row);
    }
    for (std::size_t i = 0; i < g.n; ++i) {
        bip.q_bar[i] = SparseRow(std::move(tag_rows[i]));
        bip.q[i] = SparseRow({{bip.sigma_column(), 1.0}});
    }
    return inst;
}

}  // namespace reachmax

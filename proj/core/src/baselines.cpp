#include "reachmax/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "reachmax/errors.hpp"
#include "reachmax/random.hpp"

namespace reachmax {

namespace {

// Candidates sorted by descending score, lower tag index first on ties.
std::vector<std::size_t> rank_by(const TagGraph& g, const std::vector<double>& score)
{
    std::vector<std::size_t> order = g.resolved_candidates();
    std::stable_sort(order.begin(), order.end(), [&score](std::size_t a, std::size_t b) {
        return score[a] > score[b];
    });
    return order;
}

StateSet take(const std::vector<std::size_t>& ranking, std::size_t k)
{
    std::vector<std::size_t> head(ranking.begin(),
                                  ranking.begin() + static_cast<std::ptrdiff_t>(
                                                        std::min(k, ranking.size())));
    return StateSet(std::move(head));
}

}  // namespace

std::vector<double> pagerank_scores(const TagGraph& g, const BaselineConfig& cfg)
{
    validate_graph(g);
    if (!(cfg.damping > 0.0 && cfg.damping < 1.0)) {
        throw std::invalid_argument("damping must lie in (0, 1)");
    }
    const std::size_t n_tags = g.tags.size();
    const std::size_t nodes = n_tags + g.items.size();
    const auto mass = g.tag_mass();

    std::vector<double> item_out(g.items.size(), 0.0);
    for (const auto& e : g.edges) {
        item_out[e.item] += 1.0;
    }
    for (const auto& l : g.item_links) {
        item_out[l.from] += l.weight;
    }

    // Incoming (source, probability) lists, in a fixed order.
    std::vector<std::vector<std::pair<std::size_t, double>>> incoming(nodes);
    for (const auto& e : g.edges) {
        incoming[n_tags + e.item].emplace_back(e.tag, e.weight / mass[e.tag]);
        incoming[e.tag].emplace_back(n_tags + e.item, 1.0 / item_out[e.item]);
    }
    for (const auto& l : g.item_links) {
        incoming[n_tags + l.to].emplace_back(n_tags + l.from, l.weight / item_out[l.from]);
    }
    for (auto& list : incoming) {
        std::sort(list.begin(), list.end());
    }

    const double teleport = (1.0 - cfg.damping) / static_cast<double>(nodes);
    std::vector<double> x(nodes, 1.0 / static_cast<double>(nodes));
    std::vector<double> next(nodes);
    double change = 0.0;
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        for (std::size_t v = 0; v < nodes; ++v) {
            double acc = 0.0;
            for (const auto& [u, p] : incoming[v]) {
                acc += x[u] * p;
            }
            next[v] = teleport + cfg.damping * acc;
        }
        change = 0.0;
        for (std::size_t v = 0; v < nodes; ++v) {
            change += std::abs(next[v] - x[v]);
        }
        x.swap(next);
        if (change < cfg.tolerance) {
            return x;
        }
    }
    throw NonConvergence(cfg.max_iterations, change);
}

std::vector<std::size_t> pagerank_ranking(const TagGraph& g, const BaselineConfig& cfg)
{
    return rank_by(g, pagerank_scores(g, cfg));
}

StateSet pagerank_select(const TagGraph& g, std::size_t k, const BaselineConfig& cfg)
{
    return take(pagerank_ranking(g, cfg), k);
}

std::vector<std::size_t> degree_ranking(const TagGraph& g, bool highest)
{
    validate_graph(g);
    auto deg = g.tag_degree();
    std::vector<double> score(deg.size());
    for (std::size_t j = 0; j < deg.size(); ++j) {
        score[j] = highest ? static_cast<double>(deg[j]) : -static_cast<double>(deg[j]);
    }
    return rank_by(g, score);
}

StateSet degree_select(const TagGraph& g, std::size_t k, bool highest)
{
    return take(degree_ranking(g, highest), k);
}

std::vector<std::size_t> one_step_ranking(const TagGraph& g)
{
    validate_graph(g);
    const auto mass = g.tag_mass();
    const auto pi = g.resolved_pi();
    const double w_sigma = g.resolved_sigma_weight();
    std::vector<double> score(mass.size());
    for (std::size_t j = 0; j < mass.size(); ++j) {
        score[j] = pi[j] * (w_sigma / (mass[j] + w_sigma));
    }
    return rank_by(g, score);
}

StateSet one_step_select(const TagGraph& g, std::size_t k)
{
    return take(one_step_ranking(g), k);
}

StateSet random_select(const TagGraph& g, std::size_t k, std::uint64_t seed)
{
    validate_graph(g);
    auto pool = g.resolved_candidates();
    const std::size_t take_n = std::min(k, pool.size());
    auto rng = stream_engine(seed, 0);
    for (std::size_t i = 0; i < take_n; ++i) {
        auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(take_n);
    return StateSet(std::move(pool));
}

StateSet true_tags_select(const TagGraph& g, std::size_t k)
{
    validate_graph(g);
    std::vector<std::size_t> chosen;
    for (std::size_t j : g.true_tags) {
        if (chosen.size() == k) {
            break;
        }
        if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) {
            chosen.push_back(j);
        }
    }
    return StateSet(std::move(chosen));
}

}  // namespace reachmax

#include "reachmax/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reachmax/random.hpp"

namespace reachmax {

namespace {

// Draws a tag with probability proportional to deg + 1, excluding `taken`.
std::size_t draw_tag(std::mt19937_64& rng, const std::vector<std::size_t>& degree,
                     const std::vector<bool>& taken)
{
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < degree.size(); ++j) {
        if (!taken[j]) {
            total += degree[j] + 1;
        }
    }
    std::uint64_t r = uniform_below(rng, total);
    for (std::size_t j = 0; j < degree.size(); ++j) {
        if (taken[j]) {
            continue;
        }
        if (r < degree[j] + 1) {
            return j;
        }
        r -= degree[j] + 1;
    }
    throw std::logic_error("draw_tag: no tag left");
}

}  // namespace

TagGraph gen_synthetic(const SyntheticParams& p)
{
    if (p.n_items == 0 || p.n_tags == 0) {
        throw std::invalid_argument("gen_synthetic needs at least one item and one tag");
    }
    if (p.edges_per_item == 0 || p.edges_per_item > p.n_tags) {
        throw std::invalid_argument("edges_per_item must lie in [1, n_tags]");
    }
    if (!(p.weight_exponent > 1.0)) {
        throw std::invalid_argument("weight_exponent must exceed 1");
    }
    if (!(p.focal_weight_quantile >= 0.0 && p.focal_weight_quantile <= 1.0)) {
        throw std::invalid_argument("focal_weight_quantile must lie in [0, 1]");
    }
    auto weights_rng = stream_engine(p.seed, 0);
    auto edges_rng = stream_engine(p.seed, 1);
    auto true_rng = stream_engine(p.seed, 2);

    std::vector<std::size_t> degree(p.n_tags, 0);
    std::vector<TagGraph::Edge> edges;
    edges.reserve(p.n_items * p.edges_per_item);
    std::vector<double> weights;
    for (std::size_t i = 0; i < p.n_items; ++i) {
        // 1 - u lies in (0, 1], so the power stays finite.
        const double u = 1.0 - uniform01(weights_rng);
        const double w = std::pow(u, -1.0 / (p.weight_exponent - 1.0));
        weights.push_back(w);
        std::vector<bool> taken(p.n_tags, false);
        for (std::size_t e = 0; e < p.edges_per_item; ++e) {
            std::size_t j = (e == 0 && i < p.n_tags) ? i : draw_tag(edges_rng, degree, taken);
            taken[j] = true;
            ++degree[j];
            edges.push_back({i, j, w});
        }
    }

    // Renumber tags, dropping the empty ones.
    std::vector<std::size_t> remap(p.n_tags, p.n_tags);
    TagGraph g;
    g.epsilon = p.epsilon;
    for (std::size_t j = 0; j < p.n_tags; ++j) {
        if (degree[j] > 0) {
            remap[j] = g.tags.size();
            g.tags.push_back("t" + std::to_string(j));
        }
    }
    for (std::size_t i = 0; i < p.n_items; ++i) {
        g.items.push_back("i" + std::to_string(i));
    }
    for (auto& e : edges) {
        e.tag = remap[e.tag];
    }
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return a.item != b.item ? a.item < b.item : a.tag < b.tag;
    });
    g.edges = std::move(edges);

    std::vector<std::size_t> kept_degree(g.tags.size());
    for (std::size_t j = 0; j < p.n_tags; ++j) {
        if (remap[j] < g.tags.size()) {
            kept_degree[remap[j]] = degree[j];
        }
    }
    std::sort(weights.begin(), weights.end());
    const auto at = static_cast<std::size_t>(
        std::ceil(p.focal_weight_quantile * static_cast<double>(weights.size() - 1)));
    g.sigma_weight = weights[at];

    std::vector<bool> taken(g.tags.size(), false);
    const std::size_t n_true = std::min(p.true_tags, g.tags.size());
    for (std::size_t t = 0; t < n_true; ++t) {
        std::size_t j = draw_tag(true_rng, kept_degree, taken);
        taken[j] = true;
        g.true_tags.push_back(j);
    }
    return g;
}

}  // namespace reachmax

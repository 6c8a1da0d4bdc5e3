#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "reachmax/chain_model.hpp"

namespace reachmax {

/// Bipartite item-tag system that a new item (the target) is attached to.
///
/// Browsing moves from a tag to one of its items with probability proportional
/// to the edge weight, and from an item to one of its tags uniformly, leaving
/// the system with probability `epsilon` at every item. Tagging the new item
/// with tag j adds it to j's item list with weight `sigma_weight`.
struct TagGraph {
    struct Edge {
        std::size_t item;
        std::size_t tag;
        double weight;
    };
    /// Optional direct item-to-item recommendation, weighted against the
    /// unit weight of each of the item's tags.
    struct ItemLink {
        std::size_t from;
        std::size_t to;
        double weight;
    };

    std::vector<std::string> tags;
    std::vector<std::string> items;
    std::vector<Edge> edges;
    std::vector<ItemLink> item_links;
    double epsilon = 0.1;
    /// Defaults to the median item weight (an item's weight is the mean of its edge weights).
    std::optional<double> sigma_weight;
    /// Tags eligible for selection; empty means every tag.
    std::vector<std::size_t> candidates;
    /// Initial distribution over tags; empty means uniform over the candidates.
    std::vector<double> pi_tags;
    /// The new item's own tags, most important first.
    std::vector<std::size_t> true_tags;

    double resolved_sigma_weight() const;
    std::vector<std::size_t> resolved_candidates() const;
    std::vector<double> resolved_pi() const;
    std::optional<std::size_t> find_tag(const std::string& name) const;

    /// Items of each tag, and per-tag edge-weight mass W_j.
    std::vector<std::vector<std::size_t>> tag_edges() const;
    std::vector<double> tag_mass() const;
    std::vector<std::size_t> tag_degree() const;
    std::vector<std::size_t> item_degree() const;
};

/// Throws InvalidGraph describing the first broken invariant.
void validate_graph(const TagGraph& g);

/// Full chain over tags (states 0..T-1) then items (T..T+I-1), with absorbing
/// states "empty" and "sigma". Tag states keep their tag index, so a set of
/// tags is directly a selection in this chain.
ChainSpec build_bipartite(const TagGraph& g);

/// Tag-only chain equivalent to build_bipartite for walks that start at tags.
struct FoldedChain {
    ChainSpec spec;
    std::vector<double> tag_mass;    ///< W_j
    std::vector<double> absorption;  ///< r_j once tag j is selected
};

FoldedChain fold(const TagGraph& g);

struct FoldCheck {
    double f_folded = 0.0;
    double f_full = 0.0;
    double diff = 0.0;
};

FoldCheck fold_equivalence_check(const TagGraph& g, const StateSet& tags);

}  // namespace reachmax

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "reachmax/chain_model.hpp"
#include "reachmax/tag_graph.hpp"

namespace reachmax {

struct BaselineConfig {
    std::string method;
    double damping = 0.85;
    std::uint64_t seed = 0;
    double tolerance = 1e-10;
    std::size_t max_iterations = 10000;
};

/// PageRank over all item and tag nodes, using the unlinked tag-to-item and
/// item-to-tag probabilities (leaving mass at items renormalized away) and
/// uniform teleportation. Throws NonConvergence.
std::vector<double> pagerank_scores(const TagGraph& g, const BaselineConfig& cfg);

StateSet pagerank_select(const TagGraph& g, std::size_t k, const BaselineConfig& cfg = {});

/// Candidates with the most (or fewest) items.
StateSet degree_select(const TagGraph& g, std::size_t k, bool highest);

/// Candidates ranked by pi_j * r_j, the chance of reaching the new item in one
/// step through tag j alone.
StateSet one_step_select(const TagGraph& g, std::size_t k);

/// Uniform k-subset of the candidates.
StateSet random_select(const TagGraph& g, std::size_t k, std::uint64_t seed);

/// The new item's own tags in listed order, at most k of them.
StateSet true_tags_select(const TagGraph& g, std::size_t k);

/// Ordered candidate ranking underlying each deterministic selector; the first
/// k entries form the selection. Ties go to the lower tag index.
std::vector<std::size_t> pagerank_ranking(const TagGraph& g, const BaselineConfig& cfg = {});
std::vector<std::size_t> degree_ranking(const TagGraph& g, bool highest);
std::vector<std::size_t> one_step_ranking(const TagGraph& g);

}  // namespace reachmax

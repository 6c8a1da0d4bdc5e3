#pragma once

#include <cstddef>
#include <cstdint>

#include "reachmax/tag_graph.hpp"

namespace reachmax {

struct SyntheticParams {
    std::size_t n_items = 300;
    std::size_t n_tags = 100;
    std::size_t edges_per_item = 3;
    /// Pareto exponent of the item weights, > 1.
    double weight_exponent = 2.0;
    std::uint64_t seed = 0;
    /// Size of the generated TRUE_TAGS list.
    std::size_t true_tags = 5;
    double epsilon = 0.1;
    /// SIGMA_WEIGHT is this quantile of the item weights. With about ten items
    /// per tag, 0.9 makes the new item outweigh a typical tag's heaviest item.
    double focal_weight_quantile = 0.9;
};

/// Random tag graph. Item weights follow a Pareto law w = u^(-1/(a-1)), and
/// every edge of an item carries the item's weight. Each item attaches to
/// `edges_per_item` distinct tags drawn with probability proportional to
/// degree + 1, with item i forced onto tag i first so that no tag is left
/// empty; tags still empty (n_items < n_tags) are dropped. SIGMA_WEIGHT is set
/// from `focal_weight_quantile`. The same params always give the same graph.
TagGraph gen_synthetic(const SyntheticParams& params);

}  // namespace reachmax

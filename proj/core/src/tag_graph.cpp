#include "reachmax/tag_graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "reachmax/errors.hpp"
#include "reachmax/lup_solver.hpp"
#include "reachmax/reach_objective.hpp"

namespace reachmax {

namespace {

const std::vector<std::string> kAbsorbing = {"empty", "sigma"};
constexpr std::size_t kEmpty = 0;
constexpr std::size_t kSigma = 1;

// Outgoing weights of each item: one unit per tag plus its links.
struct ItemOutflow {
    std::vector<std::vector<std::size_t>> tags;
    std::vector<std::vector<std::pair<std::size_t, double>>> links;
    std::vector<double> total;
};

ItemOutflow item_outflow(const TagGraph& g)
{
    ItemOutflow out;
    out.tags.resize(g.items.size());
    out.links.resize(g.items.size());
    out.total.assign(g.items.size(), 0.0);
    for (const auto& e : g.edges) {
        out.tags[e.item].push_back(e.tag);
        out.total[e.item] += 1.0;
    }
    for (auto& t : out.tags) {
        std::sort(t.begin(), t.end());
    }
    for (const auto& l : g.item_links) {
        out.links[l.from].emplace_back(l.to, l.weight);
        out.total[l.from] += l.weight;
    }
    return out;
}

}  // namespace

double TagGraph::resolved_sigma_weight() const
{
    if (sigma_weight) {
        return *sigma_weight;
    }
    std::vector<double> sum(items.size(), 0.0);
    std::vector<double> count(items.size(), 0.0);
    for (const auto& e : edges) {
        sum[e.item] += e.weight;
        count[e.item] += 1.0;
    }
    std::vector<double> w;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (count[i] > 0.0) {
            w.push_back(sum[i] / count[i]);
        }
    }
    if (w.empty()) {
        return 1.0;
    }
    std::sort(w.begin(), w.end());
    const std::size_t mid = w.size() / 2;
    return w.size() % 2 == 1 ? w[mid] : 0.5 * (w[mid - 1] + w[mid]);
}

std::vector<std::size_t> TagGraph::resolved_candidates() const
{
    if (!candidates.empty()) {
        std::vector<std::size_t> c = candidates;
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        return c;
    }
    std::vector<std::size_t> all(tags.size());
    for (std::size_t j = 0; j < all.size(); ++j) {
        all[j] = j;
    }
    return all;
}

std::vector<double> TagGraph::resolved_pi() const
{
    if (!pi_tags.empty()) {
        return pi_tags;
    }
    std::vector<double> pi(tags.size(), 0.0);
    auto cand = resolved_candidates();
    for (std::size_t j : cand) {
        pi[j] = 1.0 / static_cast<double>(cand.size());
    }
    return pi;
}

std::optional<std::size_t> TagGraph::find_tag(const std::string& name) const
{
    auto it = std::find(tags.begin(), tags.end(), name);
    if (it == tags.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - tags.begin());
}

std::vector<std::vector<std::size_t>> TagGraph::tag_edges() const
{
    std::vector<std::vector<std::size_t>> out(tags.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        out[edges[e].tag].push_back(e);
    }
    for (auto& list : out) {
        std::sort(list.begin(), list.end(), [this](std::size_t a, std::size_t b) {
            return edges[a].item < edges[b].item;
        });
    }
    return out;
}

std::vector<double> TagGraph::tag_mass() const
{
    std::vector<double> w(tags.size(), 0.0);
    for (const auto& e : edges) {
        w[e.tag] += e.weight;
    }
    return w;
}

std::vector<std::size_t> TagGraph::tag_degree() const
{
    std::vector<std::size_t> d(tags.size(), 0);
    for (const auto& e : edges) {
        ++d[e.tag];
    }
    return d;
}

std::vector<std::size_t> TagGraph::item_degree() const
{
    std::vector<std::size_t> d(items.size(), 0);
    for (const auto& e : edges) {
        ++d[e.item];
    }
    return d;
}

void validate_graph(const TagGraph& g)
{
    if (g.tags.empty() || g.items.empty()) {
        throw InvalidGraph("graph needs at least one tag and one item");
    }
    if (!(g.epsilon > 0.0 && g.epsilon < 1.0)) {
        throw InvalidGraph("epsilon must lie in (0, 1)");
    }
    if (g.sigma_weight && !(*g.sigma_weight > 0.0)) {
        throw InvalidGraph("sigma weight must be positive");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : g.edges) {
        if (e.item >= g.items.size() || e.tag >= g.tags.size()) {
            throw InvalidGraph("edge refers to an unknown item or tag");
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw InvalidGraph("edge weights must be positive");
        }
        if (!seen.emplace(e.item, e.tag).second) {
            throw InvalidGraph("duplicate edge " + g.items[e.item] + " / " + g.tags[e.tag]);
        }
    }
    for (const auto& l : g.item_links) {
        if (l.from >= g.items.size() || l.to >= g.items.size() || l.from == l.to) {
            throw InvalidGraph("item link refers to an unknown item or loops");
        }
        if (!(l.weight > 0.0)) {
            throw InvalidGraph("item link weights must be positive");
        }
    }
    auto td = g.tag_degree();
    for (std::size_t j = 0; j < td.size(); ++j) {
        if (td[j] == 0) {
            throw InvalidGraph("tag " + g.tags[j] + " has no items");
        }
    }
    auto id = g.item_degree();
    for (std::size_t i = 0; i < id.size(); ++i) {
        if (id[i] == 0) {
            throw InvalidGraph("item " + g.items[i] + " has no tags");
        }
    }
    for (std::size_t j : g.candidates) {
        if (j >= g.tags.size()) {
            throw InvalidGraph("candidate tag out of range");
        }
    }
    for (std::size_t j : g.true_tags) {
        if (j >= g.tags.size()) {
            throw InvalidGraph("true tag out of range");
        }
    }
    if (!g.pi_tags.empty()) {
        if (g.pi_tags.size() != g.tags.size()) {
            throw InvalidGraph("pi must have one entry per tag");
        }
        double s = 0.0;
        for (double p : g.pi_tags) {
            if (p < 0.0) {
                throw InvalidGraph("pi entries must be non-negative");
            }
            s += p;
        }
        if (std::abs(s - 1.0) > kRowSumTolerance) {
            throw InvalidGraph("pi must sum to 1");
        }
    }
    if (g.resolved_candidates().empty()) {
        throw InvalidGraph("no candidate tags");
    }
}

ChainSpec build_bipartite(const TagGraph& g)
{
    validate_graph(g);
    const std::size_t n_tags = g.tags.size();
    const std::size_t n_items = g.items.size();
    const double w_sigma = g.resolved_sigma_weight();
    const auto mass = g.tag_mass();
    const auto by_tag = g.tag_edges();
    const auto cand = g.resolved_candidates();
    const auto outflow = item_outflow(g);

    ChainSpec spec;
    spec.n_transient = n_tags + n_items;
    spec.absorbing = kAbsorbing;
    spec.sigma = kSigma;
    spec.pi.assign(spec.n_transient, 0.0);
    auto pi = g.resolved_pi();
    std::copy(pi.begin(), pi.end(), spec.pi.begin());
    spec.q.resize(spec.n_transient);
    spec.q_bar.resize(spec.n_transient);

    for (std::size_t j = 0; j < n_tags; ++j) {
        std::vector<SparseEntry> bar;
        std::vector<SparseEntry> linked;
        const double linked_total = mass[j] + w_sigma;
        for (std::size_t e : by_tag[j]) {
            auto col = static_cast<std::uint32_t>(n_tags + g.edges[e].item);
            bar.push_back({col, g.edges[e].weight / mass[j]});
            linked.push_back({col, g.edges[e].weight / linked_total});
        }
        spec.q_bar[j] = SparseRow(bar);
        if (std::binary_search(cand.begin(), cand.end(), j)) {
            linked.push_back({spec.absorbing_column(kSigma), w_sigma / linked_total});
            spec.q[j] = SparseRow(std::move(linked));
        } else {
            spec.q[j] = spec.q_bar[j];
        }
    }

    for (std::size_t i = 0; i < n_items; ++i) {
        SparseRow row;
        const double share = (1.0 - g.epsilon) / outflow.total[i];
        for (std::size_t j : outflow.tags[i]) {
            row.add(static_cast<std::uint32_t>(j), share);
        }
        for (const auto& [to, w] : outflow.links[i]) {
            row.add(static_cast<std::uint32_t>(n_tags + to), share * w);
        }
        row.add(spec.absorbing_column(kEmpty), g.epsilon);
        spec.q_bar[n_tags + i] = row;
        spec.q[n_tags + i] = std::move(row);
    }
    return spec;
}

FoldedChain fold(const TagGraph& g)
{
    validate_graph(g);
    const std::size_t n_tags = g.tags.size();
    const std::size_t n_items = g.items.size();
    const double w_sigma = g.resolved_sigma_weight();
    const auto by_tag = g.tag_edges();
    const auto cand = g.resolved_candidates();
    const auto outflow = item_outflow(g);

    // Where a walk that enters item i next reaches a tag (exit_to_tag) or
    // leaves the system (exit_to_empty). Without item links this is one step.
    std::vector<SparseRow> exit_to_tag(n_items);
    std::vector<double> exit_to_empty(n_items, g.epsilon);
    for (std::size_t i = 0; i < n_items; ++i) {
        const double share = (1.0 - g.epsilon) / outflow.total[i];
        for (std::size_t j : outflow.tags[i]) {
            exit_to_tag[i].add(static_cast<std::uint32_t>(j), share);
        }
    }
    if (!g.item_links.empty()) {
        // (I - D) X = P over items, D the item-to-item block.
        SparseMatrix m = SparseMatrix::identity(n_items);
        for (std::size_t i = 0; i < n_items; ++i) {
            const double share = (1.0 - g.epsilon) / outflow.total[i];
            for (const auto& [to, w] : outflow.links[i]) {
                m.rows[i].add(static_cast<std::uint32_t>(to), -share * w);
            }
        }
        LupFactors f = factorize(m);
        std::vector<std::vector<double>> columns(n_tags, std::vector<double>(n_items, 0.0));
        for (std::size_t i = 0; i < n_items; ++i) {
            for (const auto& e : exit_to_tag[i]) {
                columns[e.col][i] = e.value;
            }
        }
        std::vector<SparseRow> solved(n_items);
        for (std::size_t j = 0; j < n_tags; ++j) {
            auto x = f.solve(columns[j]);
            for (std::size_t i = 0; i < n_items; ++i) {
                if (x[i] != 0.0) {
                    solved[i].add(static_cast<std::uint32_t>(j), x[i]);
                }
            }
        }
        exit_to_tag = std::move(solved);
        exit_to_empty = f.solve(exit_to_empty);
    }

    FoldedChain out;
    out.tag_mass = g.tag_mass();
    out.absorption.assign(n_tags, 0.0);
    ChainSpec& spec = out.spec;
    spec.n_transient = n_tags;
    spec.absorbing = kAbsorbing;
    spec.sigma = kSigma;
    spec.pi = g.resolved_pi();
    spec.q.resize(n_tags);
    spec.q_bar.resize(n_tags);

    const std::uint32_t empty_col = spec.absorbing_column(kEmpty);
    for (std::size_t j = 0; j < n_tags; ++j) {
        SparseRow bar;
        for (std::size_t e : by_tag[j]) {
            const auto& edge = g.edges[e];
            const double to_item = edge.weight / out.tag_mass[j];
            for (const auto& t : exit_to_tag[edge.item]) {
                bar.add(t.col, to_item * t.value);
            }
            bar.add(empty_col, to_item * exit_to_empty[edge.item]);
        }
        spec.q_bar[j] = bar;
        if (std::binary_search(cand.begin(), cand.end(), j)) {
            const double keep = out.tag_mass[j] / (out.tag_mass[j] + w_sigma);
            out.absorption[j] = w_sigma / (out.tag_mass[j] + w_sigma);
            SparseRow linked = bar;
            linked.scale(keep);
            linked.add(spec.sigma_column(), out.absorption[j]);
            spec.q[j] = std::move(linked);
        } else {
            spec.q[j] = std::move(bar);
        }
    }
    return out;
}

FoldCheck fold_equivalence_check(const TagGraph& g, const StateSet& tags)
{
    FoldedChain folded = fold(g);
    ChainSpec full = build_bipartite(g);
    FoldCheck check;
    check.f_folded = eval_reach(folded.spec, tags).f;
    check.f_full = eval_reach(full, tags).f;
    check.diff = std::abs(check.f_folded - check.f_full);
    return check;
}

}  // namespace reachmax

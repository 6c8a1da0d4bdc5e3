#include <doctest.h>

#include <set>

#include "reachmax/baselines.hpp"
#include "reachmax/errors.hpp"
#include "reachmax/reach_objective.hpp"
#include "support.hpp"

using namespace reachmax;

namespace {

// Tag 0 is on every item; leaf tags 1..n sit on one item each.
TagGraph hub_and_leaves(std::size_t n)
{
    TagGraph g;
    g.tags.push_back("hub");
    for (std::size_t i = 0; i < n; ++i) {
        g.items.push_back("i" + std::to_string(i));
        g.tags.push_back("leaf" + std::to_string(i));
        g.edges.push_back({i, 0, 1.0});
        g.edges.push_back({i, i + 1, 1.0});
    }
    return g;
}

// Dense power iteration over the same walk, as an independent check.
std::vector<double> dense_pagerank(const TagGraph& g, double d)
{
    const std::size_t t = g.tags.size();
    const std::size_t n = t + g.items.size();
    std::vector<double> p(n * n, 0.0);  // p[u * n + v]: u -> v
    const auto mass = g.tag_mass();
    const auto degree = g.item_degree();
    for (const auto& e : g.edges) {
        p[e.tag * n + t + e.item] = e.weight / mass[e.tag];
        p[(t + e.item) * n + e.tag] = 1.0 / static_cast<double>(degree[e.item]);
    }
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < 2000; ++it) {
        std::vector<double> next(n, (1.0 - d) / static_cast<double>(n));
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) {
                next[v] += d * x[u] * p[u * n + v];
            }
        }
        x = next;
    }
    return x;
}

}  // namespace

TEST_CASE("pagerank")
{
    CHECK(pagerank_select(testing::graph_e3(), 1) == StateSet{0});

    TagGraph twins;
    twins.tags = {"a", "b"};
    twins.items = {"x"};
    twins.edges = {{0, 0, 1.0}, {0, 1, 1.0}};
    CHECK(pagerank_ranking(twins).front() == 0);

    TagGraph star = hub_and_leaves(5);
    CHECK(pagerank_select(star, 1) == StateSet{0});
    auto scores = pagerank_scores(star, {});
    auto dense = dense_pagerank(star, 0.85);
    for (std::size_t v = 0; v < scores.size(); ++v) {
        CHECK(scores[v] == doctest::Approx(dense[v]).epsilon(1e-8));
    }

    BaselineConfig cfg;
    cfg.max_iterations = 2;
    CHECK_THROWS_AS(pagerank_scores(star, cfg), NonConvergence);
    cfg = {};
    cfg.damping = 1.0;
    CHECK_THROWS_AS(pagerank_scores(star, cfg), std::invalid_argument);
}

TEST_CASE("degree")
{
    TagGraph star = hub_and_leaves(4);
    CHECK(degree_select(star, 1, true) == StateSet{0});
    CHECK(degree_select(star, 1, false) == StateSet{1});

    TagGraph flat;
    flat.tags = {"a", "b", "c"};
    flat.items = {"x", "y", "z"};
    flat.edges = {{0, 2, 1.0}, {1, 1, 1.0}, {2, 0, 1.0}};
    CHECK(degree_select(flat, 2, true) == StateSet{0, 1});
    CHECK(degree_select(flat, 2, false) == StateSet{0, 1});
}

TEST_CASE("one-step")
{
    TagGraph g;
    g.tags = {"heavy", "light"};
    g.items = {"x", "y"};
    g.edges = {{0, 0, 9.0}, {1, 1, 1.0}};
    g.sigma_weight = 1.0;
    // Uniform pi: r = 1/10 for the heavy tag, 1/2 for the light one.
    CHECK(one_step_ranking(g).front() == 1);
    g.pi_tags = {1.0, 0.0};
    CHECK(one_step_ranking(g).front() == 0);

    // Matches a scan of the one-step value of every single tag.
    auto rng = stream_engine(51, 0);
    for (int trial = 0; trial < 20; ++trial) {
        testing::GraphOptions o;
        o.random_pi = true;
        TagGraph r = testing::random_tag_graph(rng, o);
        const ChainSpec spec = fold(r).spec;
        const std::size_t first = one_step_ranking(r).front();
        for (std::size_t j = 0; j < r.tags.size(); ++j) {
            CHECK(one_step_value(spec, StateSet{first}) >=
                  one_step_value(spec, StateSet{j}) - 1e-15);
        }
    }
}

TEST_CASE("random")
{
    TagGraph g;
    for (std::size_t j = 0; j < 100; ++j) {
        g.tags.push_back("t" + std::to_string(j));
        g.items.push_back("i" + std::to_string(j));
        g.edges.push_back({j, j, 1.0});
    }
    CHECK(random_select(g, 100, 3).size() == 100);
    CHECK(random_select(g, 10, 3) == random_select(g, 10, 3));
    // Draw a few seeds; two fixed seeds could collide only with negligible odds.
    std::set<std::vector<std::size_t>> distinct;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        distinct.insert(random_select(g, 10, seed).states());
    }
    CHECK(distinct.size() >= 2);
}

TEST_CASE("true tags")
{
    TagGraph g = hub_and_leaves(3);
    g.true_tags = {2, 0, 3};
    CHECK(true_tags_select(g, 2) == StateSet{0, 2});
    CHECK(true_tags_select(g, 10).size() == 3);
}

TEST_CASE("every baseline returns min(k, candidates) distinct candidates")
{
    auto rng = stream_engine(52, 0);
    for (int trial = 0; trial < 20; ++trial) {
        testing::GraphOptions o;
        o.random_candidates = true;
        TagGraph g = testing::random_tag_graph(rng, o);
        const auto cand = g.resolved_candidates();
        const std::size_t k = 1 + testing::below(rng, g.tags.size() + 2);
        for (const StateSet& s :
             {pagerank_select(g, k), degree_select(g, k, true), degree_select(g, k, false),
              one_step_select(g, k), random_select(g, k, 9)}) {
            CHECK(s.size() == std::min(k, cand.size()));
            for (std::size_t j : s) {
                CHECK(std::binary_search(cand.begin(), cand.end(), j));
            }
        }
    }
}

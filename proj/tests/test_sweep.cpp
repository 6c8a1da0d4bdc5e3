#include <doctest.h>

#include <fstream>
#include <sstream>

#include "reachmax/errors.hpp"
#include "reachmax/greedy.hpp"
#include "reachmax/io.hpp"
#include "reachmax/reach_objective.hpp"
#include "reachmax/sweep.hpp"
#include "support.hpp"

using namespace reachmax;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.synthetic = {60, 20, 3, 2.0, 0};
    cfg.k_max = 6;
    cfg.instances = 2;
    cfg.seed = 99;
    return cfg;
}

std::string csv(const SweepResult& r)
{
    std::ostringstream os;
    write_sweep_csv(os, r);
    return os.str();
}

}  // namespace

TEST_CASE("one candidate, one row")
{
    ExperimentConfig cfg;
    cfg.dataset = testing::fixture_dir() / "e3.bip";
    cfg.k_max = 1;
    cfg.methods = {"greedy"};
    SweepResult r = run_sweep(cfg);
    REQUIRE(r.rows.size() == 1);
    CHECK(*r.rows[0].f == doctest::Approx(10.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("greedy variants give identical curves, non-decreasing in k")
{
    ExperimentConfig cfg = small_config();
    SweepResult r = run_sweep(cfg);
    CHECK(r.rows.size() == cfg.methods.size() * cfg.k_max);
    double previous = 0.0;
    for (std::size_t k = 1; k <= cfg.k_max; ++k) {
        const SweepRow* g = r.find("greedy", k);
        const SweepRow* l = r.find("lazy-greedy", k);
        REQUIRE(g);
        REQUIRE(l);
        CHECK(*g->f == *l->f);
        CHECK(*g->f >= previous);
        CHECK(l->n_evals <= g->n_evals);
        previous = *g->f;
        for (const auto& row : r.rows) {
            REQUIRE(row.f.has_value());
            CHECK(*row.f >= 0.0);
            CHECK(*row.f <= 1.0);
            if (row.k == k) {
                CHECK(*row.f <= *g->f + 1e-10);
            }
        }
    }
}

TEST_CASE("greedy sets are nested across k")
{
    TagGraph g = parse_bipartite_file(testing::fixture_dir() / "synth40.bip");
    auto rows = sweep_graph(g, {"greedy"}, 5, 1, false, 1);
    const ChainSpec spec = fold(g).spec;
    // Prefix f values equal the evaluation of the greedy prefix sets.
    auto full = simple_greedy(spec, 5);
    for (std::size_t k = 1; k <= 5; ++k) {
        std::vector<std::size_t> prefix(full.trace.chosen.begin(),
                                        full.trace.chosen.begin() + static_cast<long>(k));
        CHECK(*rows[k - 1].f == eval_reach(spec, StateSet(prefix)).f);
    }
}

TEST_CASE("same config, same file")
{
    ExperimentConfig cfg = small_config();
    const std::string a = csv(run_sweep(cfg));
    const std::string b = csv(run_sweep(cfg));
    CHECK(a == b);
    cfg.threads = 3;
    CHECK(csv(run_sweep(cfg)) == a);
    CHECK(a.find("# seed=99") != std::string::npos);
    CHECK(a.find("# config_hash=") != std::string::npos);

    ExperimentConfig other = small_config();
    other.seed = 100;
    CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("CSV round trip")
{
    SweepResult r = run_sweep(small_config());
    std::istringstream in(csv(r));
    SweepResult back = read_sweep_csv(in);
    REQUIRE(back.rows.size() == r.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(back.rows[i].method == r.rows[i].method);
        CHECK(back.rows[i].k == r.rows[i].k);
        CHECK(*back.rows[i].f == *r.rows[i].f);
        CHECK(back.rows[i].n_evals == r.rows[i].n_evals);
    }
    CHECK(back.metadata == r.metadata);

    std::istringstream bad("method,k,f\n");
    CHECK_THROWS_AS(read_sweep_csv(bad), ParseError);
}

TEST_CASE("a failing method leaves a FAILED row and the error propagates")
{
    const auto out = std::filesystem::temp_directory_path() / "reachmax_failed_sweep.csv";
    ExperimentConfig cfg;
    cfg.dataset = testing::fixture_dir() / "e3.bip";
    cfg.k_max = 2;
    cfg.methods = {"greedy", "true-tags"};
    cfg.output = out;
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    std::ifstream in(out);
    SweepResult partial = read_sweep_csv(in);
    REQUIRE(partial.rows.size() == 3);
    CHECK(partial.rows[1].f.has_value());
    CHECK(partial.rows[2].method == "true-tags");
    CHECK_FALSE(partial.rows[2].f.has_value());
    std::filesystem::remove(out);
}

TEST_CASE("config validation")
{
    ExperimentConfig cfg;
    cfg.k_max = 0;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
    cfg.k_max = 3;
    cfg.methods = {"greedy", "bifolkrank"};
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
    cfg.methods = {};
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
}

TEST_CASE("true tags with a short list repeat the full list")
{
    TagGraph g = parse_bipartite_file(testing::fixture_dir() / "star.bip");
    auto rows = sweep_graph(g, {"true-tags", "greedy"}, 4, 0, false);
    REQUIRE(rows.size() == 8);
    CHECK(*rows[2].f == *rows[3].f);
    CHECK(*rows[1].f >= *rows[0].f);
}

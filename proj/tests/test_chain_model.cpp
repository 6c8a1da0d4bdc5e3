#include <doctest.h>

#include "reachmax/errors.hpp"
#include "support.hpp"

using namespace reachmax;
using Kind = ValidationIssue::Kind;

namespace {

ChainSpec one_state()
{
    ChainSpec s;
    s.n_transient = 1;
    s.absorbing = {"empty", "sigma"};
    s.sigma = 1;
    s.pi = {1.0};
    s.q_bar = {SparseRow({{1, 1.0}})};
    s.q = {SparseRow({{1, 0.5}, {2, 0.5}})};
    return s;
}

ChainSpec two_state()
{
    ChainSpec s;
    s.n_transient = 2;
    s.absorbing = {"empty", "sigma"};
    s.sigma = 1;
    s.pi = {1.0, 0.0};
    s.q_bar = {SparseRow({{1, 0.5}, {2, 0.5}}), SparseRow({{2, 1.0}})};
    s.q = {SparseRow({{1, 0.5}, {3, 0.5}}), SparseRow({{3, 1.0}})};
    return s;
}

}  // namespace

TEST_CASE("well-formed chain validates cleanly")
{
    auto report = validate_chain(one_state());
    CHECK(report.ok());
    CHECK(validate_chain(testing::chain_e1()).ok());
    CHECK(validate_chain(testing::chain_e2()).ok());
}

TEST_CASE("target mass in an unlinked row is flagged")
{
    ChainSpec s = one_state();
    s.q_bar[0] = SparseRow({{1, 0.9}, {2, 0.1}});
    auto report = validate_chain(s);
    REQUIRE(report.has(Kind::TargetInUnlinkedRow));
    CHECK(report.to_string().find("absorbing-column nonzero in q_bar") != std::string::npos);
}

TEST_CASE("linked row exceeding the unlinked row is flagged at that entry")
{
    ChainSpec s = two_state();
    s.q[0] = SparseRow({{1, 0.6}, {3, 0.4}});
    auto report = validate_chain(s);
    REQUIRE(report.has(Kind::Domination));
    for (const auto& v : report.violations) {
        if (v.kind == Kind::Domination) {
            CHECK(v.row == 0);
            CHECK(v.col == 1);
        }
    }
}

TEST_CASE("other violations")
{
    SUBCASE("row sum")
    {
        ChainSpec s = two_state();
        s.q_bar[1] = SparseRow({{2, 0.8}});
        CHECK(validate_chain(s).has(Kind::RowSum));
    }
    SUBCASE("negative entry")
    {
        ChainSpec s = two_state();
        s.q_bar[1] = SparseRow({{0, -0.1}, {2, 1.1}});
        CHECK(validate_chain(s).has(Kind::NegativeProbability));
    }
    SUBCASE("pi")
    {
        ChainSpec s = two_state();
        s.pi = {0.7, 0.7};
        CHECK(validate_chain(s).has(Kind::InitialSum));
        s.pi = {1.5, -0.5};
        CHECK(validate_chain(s).has(Kind::InitialNegative));
    }
    SUBCASE("column out of range")
    {
        ChainSpec s = two_state();
        s.q[1] = SparseRow({{9, 1.0}});
        CHECK(validate_chain(s).has(Kind::ColumnOutOfRange));
    }
    SUBCASE("shape")
    {
        ChainSpec s = two_state();
        s.q.pop_back();
        CHECK(validate_chain(s).has(Kind::Shape));
    }
    SUBCASE("trapped states")
    {
        ChainSpec s = two_state();
        s.q_bar = {SparseRow({{1, 1.0}}), SparseRow({{0, 1.0}})};
        s.q = {SparseRow({{1, 0.5}, {3, 0.5}}), SparseRow({{0, 1.0}})};
        auto report = validate_chain(s);
        CHECK(report.has(Kind::Unreachable));
        CHECK_THROWS_AS(require_valid(s), ValidationError);
    }
}

TEST_CASE("renormalize fixes rows within tolerance and records it")
{
    ChainSpec s = two_state();
    s.q_bar[1] = SparseRow({{2, 1.0 + 5e-10}});
    ValidationReport report;
    renormalize(s, report);
    CHECK(s.q_bar[1].get(2) == 1.0);
    CHECK(report.notes.size() == 1);
    CHECK(validate_chain(s).ok());
}

TEST_CASE("assemble picks rows by selection")
{
    ChainSpec e1 = testing::chain_e1();
    AssembledChain linked = assemble(e1, StateSet{0});
    CHECK(linked.a.rows[0].get(0) == 0.4);
    CHECK(linked.b[0] == 0.2);
    CHECK(linked.b_other[0] == 0.4);

    AssembledChain none = assemble(e1, StateSet{});
    CHECK(none.a.rows[0].get(0) == 0.5);
    CHECK(none.b[0] == 0.0);

    CHECK_THROWS_AS(assemble(e1, StateSet{3}), std::out_of_range);
}

TEST_CASE("assembled rows follow the selection on random chains")
{
    auto rng = stream_engine(7, 0);
    for (int trial = 0; trial < 50; ++trial) {
        ChainSpec spec = testing::random_chain(rng);
        REQUIRE(validate_chain(spec).ok());
        const std::size_t n = spec.n_transient;
        StateSet s = testing::random_subset(rng, n, n);
        StateSet t = testing::random_subset(rng, n, n);
        AssembledChain a = assemble(spec, s);
        AssembledChain b = assemble(spec, t);
        std::size_t differing = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double total = a.a.rows[i].sum() + a.b[i] + a.b_other[i];
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
            if (!(a.a.rows[i] == b.a.rows[i]) || a.b[i] != b.b[i]) {
                ++differing;
            }
            CHECK(a.a.rows[i] == (s.contains(i) ? assemble(spec, StateSet{i}).a.rows[i]
                                                : assemble(spec, StateSet{}).a.rows[i]));
        }
        // Rows whose linked and unlinked versions coincide may not differ.
        CHECK(differing <= symmetric_difference_size(s, t));

        // Adding z changes only row z.
        const std::size_t z = testing::below(rng, n);
        AssembledChain c = assemble(spec, s.with(z));
        for (std::size_t i = 0; i < n; ++i) {
            if (i != z) {
                CHECK(c.a.rows[i] == a.a.rows[i]);
            }
        }
    }
}

TEST_CASE("state sets")
{
    StateSet s{4, 1, 4, 2};
    CHECK(s.size() == 3);
    CHECK(s.states().front() == 1);
    CHECK(s.contains(2));
    CHECK_FALSE(s.insert(2));
    CHECK(s.insert(0));
    CHECK(s.with(9).size() == 5);
    CHECK(symmetric_difference_size(StateSet{1, 2, 3}, StateSet{2, 5}) == 3);
}

#include <doctest.h>

#include <cmath>

#include "reachmax/errors.hpp"
#include "reachmax/lup_solver.hpp"
#include "reachmax/reach_objective.hpp"
#include "support.hpp"

using namespace reachmax;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

// ||LU - PM||_inf / ||M||_inf from the dense factors.
double factor_residual(const LupFactors& f)
{
    const std::size_t n = f.size();
    const auto l = f.dense_lower();
    const auto u = f.dense_upper();
    const SparseMatrix m = f.represented_matrix();
    const auto dense = m.to_dense();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double lu = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                lu += l[i * n + k] * u[k * n + j];
            }
            row += std::abs(lu - dense[f.perm()[i] * n + j]);
        }
        worst = std::max(worst, row);
    }
    return worst / m.norm_inf();
}

SparseMatrix diagonally_dominant(std::mt19937_64& rng, std::size_t n, std::size_t per_row)
{
    SparseMatrix m;
    m.n = n;
    m.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        for (std::size_t e = 0; e < per_row; ++e) {
            const std::size_t j = testing::below(rng, n);
            if (j == i) {
                continue;
            }
            const double v = testing::uniform(rng, -1.0, 1.0);
            m.rows[i].add(static_cast<std::uint32_t>(j), v);
            off += std::abs(v);
        }
        m.rows[i].add(static_cast<std::uint32_t>(i), off + testing::uniform(rng, 0.5, 2.0));
    }
    return m;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n)
{
    std::vector<double> v(n);
    for (auto& x : v) {
        x = testing::uniform(rng, -1.0, 1.0);
    }
    return v;
}

}  // namespace

TEST_CASE("identity factors")
{
    LupFactors f = factorize(SparseMatrix::identity(4));
    CHECK(f.dense_lower() == SparseMatrix::identity(4).to_dense());
    CHECK(f.dense_upper() == SparseMatrix::identity(4).to_dense());
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(f.perm()[k] == k);
    }
    std::vector<double> r{1.0, -2.0, 3.0, 0.5};
    CHECK(f.solve(r) == r);
    CHECK(f.solve(std::vector<double>(4, 0.0)) == std::vector<double>(4, 0.0));
}

TEST_CASE("one-state chain")
{
    ChainSpec e1 = testing::chain_e1();
    LupFactors f = factorize(system_matrix(e1, StateSet{0}));
    CHECK(f.dense_upper()[0] == doctest::Approx(0.6));
    auto c = f.solve(std::vector<double>{0.2});
    CHECK(c[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // From the unlinked factors, swap in the linked row.
    LupFactors g = factorize(system_matrix(e1, StateSet{}));
    CHECK(g.dense_upper()[0] == doctest::Approx(0.5));
    LupFactors h = g.replace_row(0, system_row(e1, 0, true));
    CHECK(h.solve(std::vector<double>{0.2})[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    // The input factors are untouched.
    CHECK(g.solve(std::vector<double>{0.5})[0] == doctest::Approx(1.0));
}

TEST_CASE("random diagonally dominant matrices factor to LU = PM")
{
    auto rng = stream_engine(11, 0);
    for (int trial = 0; trial < 10; ++trial) {
        SparseMatrix m = diagonally_dominant(rng, 50, 5);
        LupFactors f = factorize(m);
        CHECK(factor_residual(f) <= 1e-9);
        auto b = random_vector(rng, 50);
        auto x = f.solve(b);
        auto mx = m.multiply(x);
        CHECK(max_diff(mx, b) <= 1e-9 * (1.0 + norm_inf(b)));
    }
}

TEST_CASE("pivoting handles a zero diagonal")
{
    SparseMatrix m;
    m.n = 2;
    m.rows = {SparseRow({{1, 1.0}}), SparseRow({{0, 2.0}, {1, 1.0}})};
    LupFactors f = factorize(m);
    CHECK(f.perm()[0] == 1);
    auto x = f.solve(std::vector<double>{3.0, 4.0});
    CHECK(x[0] == doctest::Approx(0.5));
    CHECK(x[1] == doctest::Approx(3.0));
    CHECK(factor_residual(f) <= 1e-12);
}

TEST_CASE("singular matrices are reported")
{
    SparseMatrix m;
    m.n = 2;
    m.rows = {SparseRow({{0, 1.0}, {1, 1.0}}), SparseRow({{0, 1.0}, {1, 1.0}})};
    CHECK_THROWS_AS(factorize(m), SingularMatrix);

    // A replacement that makes the matrix singular is reported too.
    LupFactors f = factorize(SparseMatrix::identity(2));
    CHECK_THROWS_AS(f.replace_row(1, SparseRow({{0, 1.0}})), SingularMatrix);
}

TEST_CASE("replacing a row by itself is a no-op")
{
    auto rng = stream_engine(12, 0);
    SparseMatrix m = diagonally_dominant(rng, 40, 4);
    LupFactors f = factorize(m);
    auto b = random_vector(rng, 40);
    auto x = f.solve(b);
    LupFactors g = f.replace_row(17, m.rows[17]);
    CHECK(max_diff(g.solve(b), x) <= 1e-12);
}

TEST_CASE("dimension and index checks")
{
    LupFactors f = factorize(SparseMatrix::identity(3));
    CHECK_THROWS_AS(f.solve(std::vector<double>(2, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(f.replace_row(3, SparseRow()), std::out_of_range);
    CHECK_THROWS_AS(f.replace_row(0, SparseRow({{5, 1.0}})), std::invalid_argument);
}

TEST_CASE("sequential replacements along a greedy path match fresh factorizations")
{
    auto rng = stream_engine(13, 0);
    for (int trial = 0; trial < 5; ++trial) {
        testing::ChainOptions o;
        o.min_n = o.max_n = 50;
        ChainSpec spec = testing::random_chain(rng, o);
        StateSet s;
        LupFactors f = factorize(system_matrix(spec, s), UpdatePolicy::unbounded());
        for (int step = 0; step < 20; ++step) {
            std::size_t z = testing::below(rng, 50);
            while (s.contains(z)) {
                z = testing::below(rng, 50);
            }
            s.insert(z);
            f = f.replace_row(z, system_row(spec, z, true));
            auto b = target_vector(spec, s);
            auto fresh = factorize(system_matrix(spec, s)).solve(b);
            CHECK(max_diff(f.solve(b), fresh) <= 1e-9);
        }
        CHECK(f.update_count() == 20);
        CHECK(f.refactorizations() == 0);
    }
}

TEST_CASE("a row can be replaced several times")
{
    auto rng = stream_engine(14, 0);
    SparseMatrix m = diagonally_dominant(rng, 30, 4);
    LupFactors f = factorize(m);
    for (int round = 0; round < 6; ++round) {
        const std::size_t row = round % 2 == 0 ? 3 : 8;
        SparseMatrix other = diagonally_dominant(rng, 30, 4);
        m.rows[row] = other.rows[row];
        f = f.replace_row(row, m.rows[row]);
        auto b = random_vector(rng, 30);
        CHECK(max_diff(f.solve(b), factorize(m).solve(b)) <= 1e-9);
    }
    CHECK(f.represented_matrix().rows[3] == m.rows[3]);
}

TEST_CASE("the refactorization policy bounds the update chain")
{
    auto rng = stream_engine(15, 0);
    SparseMatrix m = diagonally_dominant(rng, 30, 3);
    UpdatePolicy policy;
    policy.refactor_limit = 4;
    LupFactors f = factorize(m, policy);
    for (std::size_t z = 0; z < 10; ++z) {
        SparseMatrix other = diagonally_dominant(rng, 30, 3);
        m.rows[z] = other.rows[z];
        f = f.replace_row(z, m.rows[z]);
        CHECK(f.update_count() <= 4);
    }
    CHECK(f.refactorizations() == 2);
    auto b = random_vector(rng, 30);
    CHECK(max_diff(f.solve(b), factorize(m).solve(b)) <= 1e-10);

    // Fill beyond the limit forces a refactorization as well.
    UpdatePolicy tight;
    tight.fill_limit = 1.0;
    LupFactors g = factorize(m, tight);
    SparseMatrix other = diagonally_dominant(rng, 30, 10);
    g = g.replace_row(0, other.rows[0]);
    CHECK(g.refactorizations() == 1);
    CHECK(g.update_count() == 0);
}

TEST_CASE("fill statistics count the swapped-in rows")
{
    auto rng = stream_engine(16, 0);
    SparseMatrix m = diagonally_dominant(rng, 20, 3);
    LupFactors f = factorize(m, UpdatePolicy::unbounded());
    FillStats before = f.fill_stats();
    CHECK(before.lower_nnz + before.upper_nnz == before.factorized_nnz);
    SparseMatrix other = diagonally_dominant(rng, 20, 6);
    LupFactors g = f.replace_row(5, other.rows[5]);
    FillStats after = g.fill_stats();
    CHECK(after.upper_nnz == before.upper_nnz);
    CHECK(after.max_update_entry > 0.0);
}

TEST_CASE("solves are deterministic")
{
    auto rng = stream_engine(17, 0);
    SparseMatrix m = diagonally_dominant(rng, 60, 5);
    SparseMatrix other = diagonally_dominant(rng, 60, 5);
    auto b = random_vector(rng, 60);
    auto x1 = factorize(m).replace_row(4, other.rows[4]).solve(b);
    auto x2 = factorize(m).replace_row(4, other.rows[4]).solve(b);
    CHECK(x1 == x2);
}

TEST_CASE("free-function forms")
{
    ChainSpec e1 = testing::chain_e1();
    LupFactors f = factorize(system_matrix(e1, StateSet{}));
    LupFactors g = replace_row(f, RowReplacement{0, system_row(e1, 0, true)});
    CHECK(solve(g, std::vector<double>{0.2})[0] == doctest::Approx(1.0 / 3.0));
}

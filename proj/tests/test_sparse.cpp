#include <doctest.h>

#include <stdexcept>

#include "reachmax/sparse.hpp"

using namespace reachmax;

TEST_CASE("rows stay sorted and unique")
{
    SparseRow r({{5, 0.5}, {1, 0.25}});
    REQUIRE(r.size() == 2);
    CHECK(r.entries()[0].col == 1);
    r.add(3, 0.1);
    r.add(1, 0.25);
    CHECK(r.get(1) == 0.5);
    CHECK(r.entries()[1].col == 3);
    r.set(3, 0.0);
    r.prune();
    CHECK(r.size() == 2);
    CHECK(r.get(3) == 0.0);
    CHECK(r.sum() == doctest::Approx(1.0));
    CHECK_THROWS_AS(SparseRow({{2, 0.1}, {2, 0.2}}), std::invalid_argument);
}

TEST_CASE("matrix helpers")
{
    SparseMatrix m = SparseMatrix::identity(3);
    m.rows[0].set(2, -2.0);
    std::vector<double> x{1.0, 2.0, 3.0};
    auto y = m.multiply(x);
    CHECK(y[0] == -5.0);
    CHECK(y[2] == 3.0);
    CHECK(m.nnz() == 4);
    CHECK(m.norm_inf() == 3.0);
    CHECK(m.to_dense()[2] == -2.0);
    CHECK(norm_inf(std::vector<double>{-4.0, 1.0}) == 4.0);
}

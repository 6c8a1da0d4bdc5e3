#include "reachmax/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reachmax {

SparseRow::SparseRow(std::vector<SparseEntry> entries) : entries_(std::move(entries))
{
    std::sort(entries_.begin(), entries_.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].col == entries_[i - 1].col) {
            throw std::invalid_argument("duplicate column in sparse row");
        }
    }
}

void SparseRow::add(std::uint32_t col, double value)
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), col,
                               [](const SparseEntry& e, std::uint32_t c) { return e.col < c; });
    if (it != entries_.end() && it->col == col) {
        it->value += value;
    } else {
        entries_.insert(it, SparseEntry{col, value});
    }
}

void SparseRow::set(std::uint32_t col, double value)
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), col,
                               [](const SparseEntry& e, std::uint32_t c) { return e.col < c; });
    if (it != entries_.end() && it->col == col) {
        it->value = value;
    } else {
        entries_.insert(it, SparseEntry{col, value});
    }
}

double SparseRow::get(std::uint32_t col) const
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), col,
                               [](const SparseEntry& e, std::uint32_t c) { return e.col < c; });
    return (it != entries_.end() && it->col == col) ? it->value : 0.0;
}

double SparseRow::sum() const
{
    double s = 0.0;
    for (const auto& e : entries_) {
        s += e.value;
    }
    return s;
}

void SparseRow::scale(double factor)
{
    for (auto& e : entries_) {
        e.value *= factor;
    }
}

void SparseRow::prune()
{
    std::erase_if(entries_, [](const SparseEntry& e) { return e.value == 0.0; });
}

SparseMatrix SparseMatrix::identity(std::size_t n)
{
    SparseMatrix m;
    m.n = n;
    m.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.rows[i].set(static_cast<std::uint32_t>(i), 1.0);
    }
    return m;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const
{
    if (x.size() != n) {
        throw std::invalid_argument("dimension mismatch in sparse multiply");
    }
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const auto& e : rows[i]) {
            acc += e.value * x[e.col];
        }
        y[i] = acc;
    }
    return y;
}

std::vector<double> SparseMatrix::to_dense() const
{
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& e : rows[i]) {
            d[i * n + e.col] = e.value;
        }
    }
    return d;
}

std::size_t SparseMatrix::nnz() const
{
    std::size_t total = 0;
    for (const auto& r : rows) {
        total += r.size();
    }
    return total;
}

double SparseMatrix::norm_inf() const
{
    double best = 0.0;
    for (const auto& r : rows) {
        double s = 0.0;
        for (const auto& e : r) {
            s += std::abs(e.value);
        }
        best = std::max(best, s);
    }
    return best;
}

double norm_inf(std::span<const double> v)
{
    double best = 0.0;
    for (double x : v) {
        best = std::max(best, std::abs(x));
    }
    return best;
}

}  // namespace reachmax

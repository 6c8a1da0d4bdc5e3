#include "reachmax/lup_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "reachmax/errors.hpp"

namespace reachmax {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

// Compressed columns of a triangular factor, excluding the diagonal.
struct CompressedColumns {
    std::vector<std::size_t> start;
    std::vector<std::uint32_t> index;
    std::vector<double> value;

    std::size_t nnz() const { return index.size(); }
};

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

// In-place LU with partial pivoting of a small dense matrix. Returns the
// smallest pivot magnitude.
double dense_lu(std::vector<double>& a, std::vector<std::size_t>& piv, std::size_t m)
{
    piv.resize(m);
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t best = k;
        for (std::size_t i = k + 1; i < m; ++i) {
            if (std::abs(a[i * m + k]) > std::abs(a[best * m + k])) {
                best = i;
            }
        }
        piv[k] = best;
        if (best != k) {
            for (std::size_t j = 0; j < m; ++j) {
                std::swap(a[k * m + j], a[best * m + j]);
            }
        }
        double p = a[k * m + k];
        smallest = std::min(smallest, std::abs(p));
        if (p == 0.0) {
            continue;
        }
        for (std::size_t i = k + 1; i < m; ++i) {
            double factor = a[i * m + k] / p;
            a[i * m + k] = factor;
            for (std::size_t j = k + 1; j < m; ++j) {
                a[i * m + j] -= factor * a[k * m + j];
            }
        }
    }
    return smallest;
}

void dense_lu_solve(const std::vector<double>& lu, const std::vector<std::size_t>& piv,
                    std::size_t m, std::vector<double>& x)
{
    for (std::size_t k = 0; k < m; ++k) {
        std::swap(x[k], x[piv[k]]);
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            x[i] -= lu[i * m + j] * x[j];
        }
    }
    for (std::size_t i = m; i-- > 0;) {
        for (std::size_t j = i + 1; j < m; ++j) {
            x[i] -= lu[i * m + j] * x[j];
        }
        x[i] /= lu[i * m + i];
    }
}

}  // namespace

UpdatePolicy UpdatePolicy::unbounded()
{
    UpdatePolicy p;
    p.refactor_limit = std::numeric_limits<std::size_t>::max();
    p.fill_limit = std::numeric_limits<double>::infinity();
    p.growth_limit = std::numeric_limits<double>::infinity();
    return p;
}

struct LupFactors::Base {
    std::size_t n = 0;
    SparseMatrix matrix;
    CompressedColumns lower;  // rows are pivot positions
    CompressedColumns upper;  // rows are pivot positions
    std::vector<double> diagonal;
    std::vector<std::size_t> perm;
    std::vector<std::size_t> pinv;
    std::vector<std::size_t> lower_row_nnz;  // per position, including the unit diagonal

    std::size_t lower_nnz() const { return lower.nnz() + n; }
    std::size_t upper_nnz() const { return upper.nnz() + n; }

    // y := L^{-1} y, y indexed by pivot position.
    void forward(std::vector<double>& y, std::size_t first = 0) const
    {
        for (std::size_t j = first; j < n; ++j) {
            double yj = y[j];
            if (yj == 0.0) {
                continue;
            }
            for (std::size_t p = lower.start[j]; p < lower.start[j + 1]; ++p) {
                y[lower.index[p]] -= lower.value[p] * yj;
            }
        }
    }

    // y := U^{-1} y
    void backward(std::vector<double>& y) const
    {
        for (std::size_t j = n; j-- > 0;) {
            double xj = y[j] / diagonal[j];
            y[j] = xj;
            if (xj == 0.0) {
                continue;
            }
            for (std::size_t p = upper.start[j]; p < upper.start[j + 1]; ++p) {
                y[upper.index[p]] -= upper.value[p] * xj;
            }
        }
    }

    // Solves v^T U = r^T, i.e. U^T v = r.
    std::vector<double> transpose_upper_solve(std::vector<double> r) const
    {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = r[j];
            for (std::size_t p = upper.start[j]; p < upper.start[j + 1]; ++p) {
                acc -= upper.value[p] * r[upper.index[p]];
            }
            r[j] = acc / diagonal[j];
        }
        return r;
    }
};

struct LupFactors::Spike {
    std::size_t row = 0;       // row of M that was replaced
    std::size_t position = 0;  // its pivot position
    SparseRow new_row;
    std::vector<double> lower_row;   // replacement row of L, solves v^T U = new_row
    std::vector<double> unit_image;  // L^{-1} e_position
    std::size_t lower_row_nnz = 0;
    double max_entry = 0.0;
};

std::size_t LupFactors::size() const noexcept
{
    return base_ ? base_->n : 0;
}

const std::vector<std::size_t>& LupFactors::perm() const noexcept
{
    return base_->perm;
}

LupFactors factorize(const SparseMatrix& m, UpdatePolicy policy)
{
    const std::size_t n = m.n;
    if (m.rows.size() != n) {
        throw std::invalid_argument("factorize: matrix is not square");
    }

    // Column access to M.
    std::vector<std::size_t> col_start(n + 1, 0);
    for (const auto& row : m.rows) {
        for (const auto& e : row) {
            if (e.col >= n) {
                throw std::invalid_argument("factorize: column index out of range");
            }
            ++col_start[e.col + 1];
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        col_start[j + 1] += col_start[j];
    }
    std::vector<std::uint32_t> col_row(col_start[n]);
    std::vector<double> col_val(col_start[n]);
    {
        std::vector<std::size_t> next(col_start.begin(), col_start.end() - 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& e : m.rows[i]) {
                col_row[next[e.col]] = static_cast<std::uint32_t>(i);
                col_val[next[e.col]++] = e.value;
            }
        }
    }

    auto base = std::make_shared<LupFactors::Base>();
    base->n = n;
    base->matrix = m;
    base->diagonal.assign(n, 0.0);
    base->perm.assign(n, kUnassigned);
    base->pinv.assign(n, kUnassigned);
    auto& lower = base->lower;
    auto& upper = base->upper;
    lower.start.assign(n + 1, 0);
    upper.start.assign(n + 1, 0);

    // Left-looking elimination on a dense work column. Rows of L are kept as
    // original row indices until the end.
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t p = col_start[k]; p < col_start[k + 1]; ++p) {
            x[col_row[p]] = col_val[p];
        }
        for (std::size_t j = 0; j < k; ++j) {
            double xr = x[base->perm[j]];
            if (xr == 0.0) {
                continue;
            }
            for (std::size_t p = lower.start[j]; p < lower.start[j + 1]; ++p) {
                x[lower.index[p]] -= lower.value[p] * xr;
            }
        }
        upper.start[k] = upper.nnz();
        for (std::size_t j = 0; j < k; ++j) {
            double u = x[base->perm[j]];
            if (u != 0.0) {
                upper.index.push_back(static_cast<std::uint32_t>(j));
                upper.value.push_back(u);
            }
        }

        std::size_t pivot_row = kUnassigned;
        double largest = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (base->pinv[i] == kUnassigned && std::abs(x[i]) > largest) {
                largest = std::abs(x[i]);
                pivot_row = i;
            }
        }
        if (base->pinv[k] == kUnassigned &&
            std::abs(x[k]) >= policy.pivot_tolerance * largest) {
            pivot_row = k;
        }
        double pivot = x[pivot_row];
        if (std::abs(pivot) < kPivotThreshold) {
            throw SingularMatrix(k, pivot);
        }
        base->pinv[pivot_row] = k;
        base->perm[k] = pivot_row;
        base->diagonal[k] = pivot;

        lower.start[k] = lower.nnz();
        for (std::size_t i = 0; i < n; ++i) {
            if (base->pinv[i] == kUnassigned && x[i] != 0.0) {
                lower.index.push_back(static_cast<std::uint32_t>(i));
                lower.value.push_back(x[i] / pivot);
            }
        }
        lower.start[k + 1] = lower.nnz();
        upper.start[k + 1] = upper.nnz();
        std::fill(x.begin(), x.end(), 0.0);
    }
    lower.start[n] = lower.nnz();
    upper.start[n] = upper.nnz();

    base->lower_row_nnz.assign(n, 1);
    for (auto& idx : lower.index) {
        idx = static_cast<std::uint32_t>(base->pinv[idx]);
        ++base->lower_row_nnz[idx];
    }

    LupFactors f;
    f.base_ = std::move(base);
    f.policy_ = policy;
    return f;
}

std::vector<double> LupFactors::solve(std::span<const double> rhs) const
{
    const std::size_t n = size();
    if (rhs.size() != n) {
        throw std::invalid_argument("solve: dimension mismatch");
    }
    std::vector<double> permuted(n);
    for (std::size_t k = 0; k < n; ++k) {
        permuted[k] = rhs[base_->perm[k]];
    }
    std::vector<double> y = permuted;
    base_->forward(y);

    const std::size_t m = spikes_.size();
    if (m > 0) {
        std::vector<double> t(m);
        for (std::size_t a = 0; a < m; ++a) {
            t[a] = dot(spikes_[a]->lower_row, y) - permuted[spikes_[a]->position];
        }
        dense_lu_solve(capacitance_lu_, capacitance_pivots_, m, t);
        for (std::size_t b = 0; b < m; ++b) {
            const auto& g = spikes_[b]->unit_image;
            double s = t[b];
            if (s == 0.0) {
                continue;
            }
            for (std::size_t i = spikes_[b]->position; i < n; ++i) {
                y[i] -= g[i] * s;
            }
        }
    }
    base_->backward(y);
    return y;
}

bool LupFactors::rebuild_capacitance(const std::vector<double>& previous, std::size_t changed)
{
    // Entry (a, b) is lower_row_a . unit_image_b. Only row `changed` (and the
    // column, when it is new) differ from `previous`.
    const std::size_t m = spikes_.size();
    const std::size_t old_m = (changed == m - 1 && previous.size() == (m - 1) * (m - 1)) ? m - 1 : m;
    capacitance_.assign(m * m, 0.0);
    for (std::size_t a = 0; a < old_m; ++a) {
        for (std::size_t b = 0; b < old_m; ++b) {
            capacitance_[a * m + b] = previous[a * old_m + b];
        }
    }
    for (std::size_t b = 0; b < m; ++b) {
        capacitance_[changed * m + b] =
            dot(spikes_[changed]->lower_row, spikes_[b]->unit_image);
    }
    for (std::size_t a = 0; a < m; ++a) {
        capacitance_[a * m + changed] =
            dot(spikes_[a]->lower_row, spikes_[changed]->unit_image);
    }
    capacitance_lu_ = capacitance_;
    double smallest = dense_lu(capacitance_lu_, capacitance_pivots_, m);
    return smallest >= kPivotThreshold;
}

LupFactors LupFactors::refactored(std::size_t row, const SparseRow& new_row) const
{
    SparseMatrix m = represented_matrix();
    m.rows[row] = new_row;
    LupFactors f = factorize(m, policy_);
    f.refactorizations_ = refactorizations_ + 1;
    return f;
}

LupFactors LupFactors::replace_row(std::size_t row, const SparseRow& new_row) const
{
    const std::size_t n = size();
    if (row >= n) {
        throw std::out_of_range("replace_row: row index out of range");
    }
    for (const auto& e : new_row) {
        if (e.col >= n) {
            throw std::invalid_argument("replace_row: column index out of range");
        }
    }
    if (update_count_ >= policy_.refactor_limit) {
        return refactored(row, new_row);
    }

    auto spike = std::make_shared<Spike>();
    spike->row = row;
    spike->position = base_->pinv[row];
    spike->new_row = new_row;
    {
        std::vector<double> dense(n, 0.0);
        for (const auto& e : new_row) {
            dense[e.col] = e.value;
        }
        spike->lower_row = base_->transpose_upper_solve(std::move(dense));
    }
    for (double v : spike->lower_row) {
        if (v != 0.0) {
            ++spike->lower_row_nnz;
            spike->max_entry = std::max(spike->max_entry, std::abs(v));
        }
    }
    if (!(spike->max_entry <= policy_.growth_limit)) {
        return refactored(row, new_row);
    }

    LupFactors out = *this;
    out.update_count_ = update_count_ + 1;

    auto existing = std::find_if(out.spikes_.begin(), out.spikes_.end(),
                                 [row](const auto& s) { return s->row == row; });
    std::size_t changed;
    if (existing != out.spikes_.end()) {
        spike->unit_image = (*existing)->unit_image;
        changed = static_cast<std::size_t>(existing - out.spikes_.begin());
        *existing = std::move(spike);
    } else {
        spike->unit_image.assign(n, 0.0);
        spike->unit_image[spike->position] = 1.0;
        base_->forward(spike->unit_image, spike->position);
        out.spikes_.push_back(std::move(spike));
        changed = out.spikes_.size() - 1;
    }

    FillStats fill = out.fill_stats();
    if (static_cast<double>(fill.lower_nnz + fill.upper_nnz) >
        policy_.fill_limit * static_cast<double>(fill.factorized_nnz)) {
        return refactored(row, new_row);
    }
    if (!out.rebuild_capacitance(capacitance_, changed)) {
        // Either the update lost accuracy or the matrix is singular; a fresh
        // factorization tells the two apart.
        return refactored(row, new_row);
    }
    return out;
}

FillStats LupFactors::fill_stats() const
{
    FillStats s;
    s.factorized_nnz = base_->lower_nnz() + base_->upper_nnz();
    s.upper_nnz = base_->upper_nnz();
    s.lower_nnz = base_->lower_nnz();
    for (const auto& spike : spikes_) {
        s.lower_nnz -= base_->lower_row_nnz[spike->position];
        s.lower_nnz += spike->lower_row_nnz;
        s.max_update_entry = std::max(s.max_update_entry, spike->max_entry);
    }
    return s;
}

SparseMatrix LupFactors::represented_matrix() const
{
    SparseMatrix m = base_->matrix;
    for (const auto& spike : spikes_) {
        m.rows[spike->row] = spike->new_row;
    }
    return m;
}

std::vector<double> LupFactors::dense_lower() const
{
    const std::size_t n = size();
    std::vector<double> l(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        l[j * n + j] = 1.0;
        for (std::size_t p = base_->lower.start[j]; p < base_->lower.start[j + 1]; ++p) {
            l[base_->lower.index[p] * n + j] = base_->lower.value[p];
        }
    }
    for (const auto& spike : spikes_) {
        std::copy(spike->lower_row.begin(), spike->lower_row.end(),
                  l.begin() + static_cast<std::ptrdiff_t>(spike->position * n));
    }
    return l;
}

std::vector<double> LupFactors::dense_upper() const
{
    const std::size_t n = size();
    std::vector<double> u(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        u[j * n + j] = base_->diagonal[j];
        for (std::size_t p = base_->upper.start[j]; p < base_->upper.start[j + 1]; ++p) {
            u[base_->upper.index[p] * n + j] = base_->upper.value[p];
        }
    }
    return u;
}

std::vector<double> solve(const LupFactors& f, std::span<const double> rhs)
{
    return f.solve(rhs);
}

LupFactors replace_row(const LupFactors& f, const RowReplacement& r)
{
    return f.replace_row(r.row, r.new_row);
}

}  // namespace reachmax

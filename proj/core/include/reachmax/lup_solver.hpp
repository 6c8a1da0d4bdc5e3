#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "reachmax/sparse.hpp"

namespace reachmax {

/// Pivots with magnitude below this are treated as singular.
inline constexpr double kPivotThreshold = 1e-12;

/// When a row-replacement sequence is folded back into a fresh factorization.
struct UpdatePolicy {
    /// Updates allowed since the last full factorization.
    std::size_t refactor_limit = 64;
    /// Allowed ratio of current factor nonzeros to those of the last full factorization.
    double fill_limit = 4.0;
    /// Largest factor entry tolerated in an updated row before refactoring.
    double growth_limit = 1e8;
    /// Threshold partial pivoting: the diagonal is kept whenever its magnitude is
    /// at least this fraction of the column maximum.
    double pivot_tolerance = 0.1;

    /// Never refactor on its own; updates accumulate until singular.
    static UpdatePolicy unbounded();
};

struct FillStats {
    std::size_t lower_nnz = 0;  ///< including the unit diagonal
    std::size_t upper_nnz = 0;  ///< including the diagonal
    std::size_t factorized_nnz = 0;  ///< lower + upper at the last full factorization
    double max_update_entry = 0.0;
};

struct RowReplacement {
    std::size_t row;
    SparseRow new_row;
};

/// Permuted LU factors of a square sparse matrix M, L U = P M, that also
/// absorb row replacements without refactoring.
///
/// A replacement of row z keeps U and swaps row P(z) of L for the row vector
/// that reproduces the new matrix row against U. The swapped rows make L
/// non-triangular; solves handle them with a small dense capacitance system,
/// one dimension per replaced row. Values are immutable: `replace_row` returns
/// new factors that share the untouched parts.
class LupFactors {
public:
    std::size_t size() const noexcept;

    /// Returns x with M x = rhs.
    std::vector<double> solve(std::span<const double> rhs) const;

    LupFactors replace_row(std::size_t row, const SparseRow& new_row) const;

    std::size_t update_count() const noexcept { return update_count_; }
    std::size_t refactorizations() const noexcept { return refactorizations_; }
    FillStats fill_stats() const;
    const UpdatePolicy& policy() const noexcept { return policy_; }

    /// perm()[k] is the row of M placed at position k.
    const std::vector<std::size_t>& perm() const noexcept;

    /// The matrix these factors currently represent.
    SparseMatrix represented_matrix() const;

    /// Dense row-major factors, for inspection in tests. `dense_lower` includes
    /// the rows swapped in by updates.
    std::vector<double> dense_lower() const;
    std::vector<double> dense_upper() const;

private:
    struct Base;
    struct Spike;

    friend LupFactors factorize(const SparseMatrix& m, UpdatePolicy policy);

    LupFactors refactored(std::size_t row, const SparseRow& new_row) const;
    bool rebuild_capacitance(const std::vector<double>& previous, std::size_t changed);

    std::shared_ptr<const Base> base_;
    std::vector<std::shared_ptr<const Spike>> spikes_;
    std::vector<double> capacitance_;     // m x m, row-major, spike order
    std::vector<double> capacitance_lu_;  // packed LU of the above
    std::vector<std::size_t> capacitance_pivots_;
    std::size_t update_count_ = 0;
    std::size_t refactorizations_ = 0;
    UpdatePolicy policy_;
};

/// Threshold-partial-pivoting sparse LU. Throws SingularMatrix when no
/// acceptable pivot reaches kPivotThreshold.
LupFactors factorize(const SparseMatrix& m, UpdatePolicy policy = {});

std::vector<double> solve(const LupFactors& f, std::span<const double> rhs);

LupFactors replace_row(const LupFactors& f, const RowReplacement& r);

}  // namespace reachmax

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace reachmax {

struct SparseEntry {
    std::uint32_t col;
    double value;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Row of (column, value) pairs, kept sorted by column with no duplicates.
class SparseRow {
public:
    SparseRow() = default;
    explicit SparseRow(std::vector<SparseEntry> entries);

    /// Adds `value` to column `col`, keeping order.
    void add(std::uint32_t col, double value);
    void set(std::uint32_t col, double value);
    double get(std::uint32_t col) const;

    double sum() const;
    void scale(double factor);
    /// Removes entries that are exactly zero.
    void prune();

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::span<const SparseEntry> entries() const noexcept { return entries_; }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    friend bool operator==(const SparseRow&, const SparseRow&) = default;

private:
    std::vector<SparseEntry> entries_;
};

/// Square matrix stored as sparse rows.
struct SparseMatrix {
    std::size_t n = 0;
    std::vector<SparseRow> rows;

    static SparseMatrix identity(std::size_t n);

    /// y = M x
    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<double> to_dense() const;
    std::size_t nnz() const;
    double norm_inf() const;
};

double norm_inf(std::span<const double> v);

}  // namespace reachmax

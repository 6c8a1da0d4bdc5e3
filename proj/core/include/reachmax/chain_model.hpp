#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "reachmax/sparse.hpp"

namespace reachmax {

inline constexpr double kRowSumTolerance = 1e-9;
/// Sums closer to 1 than this are left alone at load; rescaling would only
/// trade one rounding error for another.
inline constexpr double kRenormalizeFloor = 1e-13;
inline constexpr double kDominationTolerance = 1e-12;

/// A problem instance: transient states 0..n-1, a list of absorbing states of
/// which one is the target, and two transition tables.
///
/// Rows of `q` and `q_bar` index columns 0..n-1 for transient states and
/// n..n+r-1 for absorbing states, in the order of `absorbing`. `q` is the row a
/// state uses once it is linked to the target, `q_bar` the row it uses otherwise.
struct ChainSpec {
    std::size_t n_transient = 0;
    std::vector<std::string> absorbing;
    std::size_t sigma = 0;  ///< index into `absorbing`
    std::vector<double> pi;
    std::vector<SparseRow> q;
    std::vector<SparseRow> q_bar;

    std::size_t n_columns() const noexcept { return n_transient + absorbing.size(); }
    std::uint32_t absorbing_column(std::size_t a) const noexcept
    {
        return static_cast<std::uint32_t>(n_transient + a);
    }
    std::uint32_t sigma_column() const noexcept { return absorbing_column(sigma); }
    bool is_transient_column(std::uint32_t col) const noexcept { return col < n_transient; }
};

/// Sorted, duplicate-free set of transient state indices.
class StateSet {
public:
    StateSet() = default;
    StateSet(std::initializer_list<std::size_t> states);
    explicit StateSet(std::vector<std::size_t> states);

    bool contains(std::size_t s) const;
    /// Returns false if `s` was already present.
    bool insert(std::size_t s);
    StateSet with(std::size_t s) const;

    std::size_t size() const noexcept { return states_.size(); }
    bool empty() const noexcept { return states_.empty(); }
    const std::vector<std::size_t>& states() const noexcept { return states_; }
    auto begin() const noexcept { return states_.begin(); }
    auto end() const noexcept { return states_.end(); }

    friend bool operator==(const StateSet&, const StateSet&) = default;

private:
    std::vector<std::size_t> states_;
};

/// Number of elements in the symmetric difference.
std::size_t symmetric_difference_size(const StateSet& a, const StateSet& b);

struct ValidationIssue {
    enum class Kind {
        Shape,
        ColumnOutOfRange,
        NegativeProbability,
        RowSum,
        TargetInUnlinkedRow,
        Domination,
        InitialNegative,
        InitialSum,
        InitialOnAbsorbing,
        Unreachable,
    };

    Kind kind;
    std::size_t row = 0;
    std::size_t col = 0;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> violations;
    /// Non-fatal adjustments, such as rows renormalized at load.
    std::vector<std::string> notes;

    bool ok() const noexcept { return violations.empty(); }
    bool has(ValidationIssue::Kind kind) const;
    std::string to_string() const;
};

/// Lists every violated invariant. Never throws.
ValidationReport validate_chain(const ChainSpec& spec);

/// Rescales rows and `pi` whose sums are within tolerance of 1 but off by more
/// than rounding,
/// recording each one in `report.notes`.
void renormalize(ChainSpec& spec, ValidationReport& report);

/// Throws ValidationError carrying the report text if the chain is not well-formed.
void require_valid(const ChainSpec& spec);

/// Transient block A(S), target column b(S) and the mass going to the other
/// absorbing states.
struct AssembledChain {
    SparseMatrix a;
    std::vector<double> b;
    std::vector<double> b_other;
};

const SparseRow& selected_row(const ChainSpec& spec, const StateSet& s, std::size_t i);

AssembledChain assemble(const ChainSpec& spec, const StateSet& s);

/// Row i of I - A(S) given whether i is linked.
SparseRow system_row(const ChainSpec& spec, std::size_t i, bool linked);

/// I - A(S)
SparseMatrix system_matrix(const ChainSpec& spec, const StateSet& s);

/// b(S)
std::vector<double> target_vector(const ChainSpec& spec, const StateSet& s);

void check_selection(const ChainSpec& spec, const StateSet& s);

}  // namespace reachmax

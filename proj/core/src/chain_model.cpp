#include "reachmax/chain_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "reachmax/errors.hpp"

namespace reachmax {

StateSet::StateSet(std::initializer_list<std::size_t> states)
    : StateSet(std::vector<std::size_t>(states))
{
}

StateSet::StateSet(std::vector<std::size_t> states) : states_(std::move(states))
{
    std::sort(states_.begin(), states_.end());
    states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
}

bool StateSet::contains(std::size_t s) const
{
    return std::binary_search(states_.begin(), states_.end(), s);
}

bool StateSet::insert(std::size_t s)
{
    auto it = std::lower_bound(states_.begin(), states_.end(), s);
    if (it != states_.end() && *it == s) {
        return false;
    }
    states_.insert(it, s);
    return true;
}

StateSet StateSet::with(std::size_t s) const
{
    StateSet out = *this;
    out.insert(s);
    return out;
}

std::size_t symmetric_difference_size(const StateSet& a, const StateSet& b)
{
    std::vector<std::size_t> diff;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(diff));
    return diff.size();
}

bool ValidationReport::has(ValidationIssue::Kind kind) const
{
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const ValidationIssue& v) { return v.kind == kind; });
}

std::string ValidationReport::to_string() const
{
    std::ostringstream os;
    for (const auto& v : violations) {
        os << "violation: " << v.message << '\n';
    }
    for (const auto& n : notes) {
        os << "note: " << n << '\n';
    }
    return os.str();
}

namespace {

using Kind = ValidationIssue::Kind;

void add_issue(ValidationReport& report, Kind kind, std::size_t row, std::size_t col,
               std::string message)
{
    report.violations.push_back(ValidationIssue{kind, row, col, std::move(message)});
}

// States that can reach an absorbing column along positive entries of `rows`.
std::vector<bool> reaches_absorption(const ChainSpec& spec, const std::vector<SparseRow>& rows)
{
    const std::size_t n = spec.n_transient;
    std::vector<std::vector<std::size_t>> reverse(n);
    std::vector<bool> good(n, false);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& e : rows[i]) {
            if (e.value <= 0.0) {
                continue;
            }
            if (e.col < n) {
                reverse[e.col].push_back(i);
            } else if (!good[i]) {
                good[i] = true;
                stack.push_back(i);
            }
        }
    }
    while (!stack.empty()) {
        std::size_t j = stack.back();
        stack.pop_back();
        for (std::size_t i : reverse[j]) {
            if (!good[i]) {
                good[i] = true;
                stack.push_back(i);
            }
        }
    }
    return good;
}

void check_rows(const ChainSpec& spec, const std::vector<SparseRow>& rows, const char* name,
                ValidationReport& report)
{
    const std::size_t cols = spec.n_columns();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        bool in_range = true;
        for (const auto& e : rows[i]) {
            if (e.col >= cols) {
                in_range = false;
                add_issue(report, Kind::ColumnOutOfRange, i, e.col,
                          std::string(name) + " row " + std::to_string(i) + ": column " +
                              std::to_string(e.col) + " out of range");
            } else if (e.value < 0.0 || !std::isfinite(e.value)) {
                add_issue(report, Kind::NegativeProbability, i, e.col,
                          std::string(name) + " entry (" + std::to_string(i) + "," +
                              std::to_string(e.col) + ") is not a probability");
            }
        }
        double s = rows[i].sum();
        if (in_range && std::abs(s - 1.0) > kRowSumTolerance) {
            std::ostringstream os;
            os.precision(17);
            os << name << " row " << i << " sums to " << s;
            add_issue(report, Kind::RowSum, i, 0, os.str());
        }
    }
}

}  // namespace

ValidationReport validate_chain(const ChainSpec& spec)
{
    ValidationReport report;
    const std::size_t n = spec.n_transient;
    if (spec.q.size() != n || spec.q_bar.size() != n || spec.pi.size() != n) {
        add_issue(report, Kind::Shape, 0, 0,
                  "q, q_bar and pi must each have n_transient entries");
        return report;
    }
    if (spec.absorbing.empty() || spec.sigma >= spec.absorbing.size()) {
        add_issue(report, Kind::Shape, 0, 0, "target must be one of the absorbing states");
        return report;
    }

    check_rows(spec, spec.q, "q", report);
    check_rows(spec, spec.q_bar, "q_bar", report);

    const std::uint32_t sigma = spec.sigma_column();
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.q_bar[i].get(sigma) != 0.0) {
            add_issue(report, Kind::TargetInUnlinkedRow, i, sigma,
                      "absorbing-column nonzero in q_bar at row " + std::to_string(i));
        }
        for (const auto& e : spec.q[i]) {
            if (e.col == sigma) {
                continue;
            }
            double bar = spec.q_bar[i].get(e.col);
            if (e.value > bar + kDominationTolerance) {
                std::ostringstream os;
                os.precision(17);
                os << "q exceeds q_bar at (" << i << "," << e.col << "): " << e.value
                   << " > " << bar;
                add_issue(report, Kind::Domination, i, e.col, os.str());
            }
        }
    }

    double pi_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.pi[i] < 0.0 || !std::isfinite(spec.pi[i])) {
            add_issue(report, Kind::InitialNegative, i, 0,
                      "pi entry " + std::to_string(i) + " is negative");
        }
        pi_sum += spec.pi[i];
    }
    if (std::abs(pi_sum - 1.0) > kRowSumTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "pi sums to " << pi_sum;
        add_issue(report, Kind::InitialSum, 0, 0, os.str());
    }

    if (!report.has(Kind::ColumnOutOfRange)) {
        auto bar_ok = reaches_absorption(spec, spec.q_bar);
        auto q_ok = reaches_absorption(spec, spec.q);
        for (std::size_t i = 0; i < n; ++i) {
            if (!bar_ok[i]) {
                add_issue(report, Kind::Unreachable, i, 0,
                          "state " + std::to_string(i) + " cannot reach absorption under q_bar");
            }
            if (!q_ok[i]) {
                add_issue(report, Kind::Unreachable, i, 0,
                          "state " + std::to_string(i) + " cannot reach absorption under q");
            }
        }
    }
    return report;
}

void renormalize(ChainSpec& spec, ValidationReport& report)
{
    auto fix = [&report](SparseRow& row, const std::string& what) {
        double s = row.sum();
        if (std::abs(s - 1.0) > kRenormalizeFloor && std::abs(s - 1.0) <= kRowSumTolerance) {
            row.scale(1.0 / s);
            std::ostringstream os;
            os.precision(17);
            os << "renormalized " << what << " (sum was " << s << ")";
            report.notes.push_back(os.str());
        }
    };
    for (std::size_t i = 0; i < spec.q.size(); ++i) {
        fix(spec.q[i], "q row " + std::to_string(i));
    }
    for (std::size_t i = 0; i < spec.q_bar.size(); ++i) {
        fix(spec.q_bar[i], "q_bar row " + std::to_string(i));
    }
    double s = 0.0;
    for (double p : spec.pi) {
        s += p;
    }
    if (std::abs(s - 1.0) > kRenormalizeFloor && std::abs(s - 1.0) <= kRowSumTolerance) {
        for (double& p : spec.pi) {
            p /= s;
        }
        std::ostringstream os;
        os.precision(17);
        os << "renormalized pi (sum was " << s << ")";
        report.notes.push_back(os.str());
    }
}

void require_valid(const ChainSpec& spec)
{
    auto report = validate_chain(spec);
    if (!report.ok()) {
        throw ValidationError(report.to_string());
    }
}

void check_selection(const ChainSpec& spec, const StateSet& s)
{
    for (std::size_t i : s) {
        if (i >= spec.n_transient) {
            throw std::out_of_range("state " + std::to_string(i) + " is not a transient state");
        }
    }
}

const SparseRow& selected_row(const ChainSpec& spec, const StateSet& s, std::size_t i)
{
    return s.contains(i) ? spec.q[i] : spec.q_bar[i];
}

AssembledChain assemble(const ChainSpec& spec, const StateSet& s)
{
    check_selection(spec, s);
    const std::size_t n = spec.n_transient;
    const std::uint32_t sigma = spec.sigma_column();
    AssembledChain out;
    out.a.n = n;
    out.a.rows.resize(n);
    out.b.assign(n, 0.0);
    out.b_other.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<SparseEntry> transient;
        for (const auto& e : selected_row(spec, s, i)) {
            if (e.col < n) {
                transient.push_back(e);
            } else if (e.col == sigma) {
                out.b[i] += e.value;
            } else {
                out.b_other[i] += e.value;
            }
        }
        out.a.rows[i] = SparseRow(std::move(transient));
    }
    return out;
}

SparseRow system_row(const ChainSpec& spec, std::size_t i, bool linked)
{
    const SparseRow& src = linked ? spec.q[i] : spec.q_bar[i];
    std::vector<SparseEntry> entries;
    entries.reserve(src.size() + 1);
    bool diagonal = false;
    for (const auto& e : src) {
        if (e.col >= spec.n_transient) {
            continue;
        }
        if (e.col == i) {
            entries.push_back({e.col, 1.0 - e.value});
            diagonal = true;
        } else {
            entries.push_back({e.col, -e.value});
        }
    }
    if (!diagonal) {
        entries.push_back({static_cast<std::uint32_t>(i), 1.0});
    }
    SparseRow row(std::move(entries));
    row.prune();
    return row;
}

SparseMatrix system_matrix(const ChainSpec& spec, const StateSet& s)
{
    check_selection(spec, s);
    SparseMatrix m;
    m.n = spec.n_transient;
    m.rows.reserve(m.n);
    for (std::size_t i = 0; i < m.n; ++i) {
        m.rows.push_back(system_row(spec, i, s.contains(i)));
    }
    return m;
}

std::vector<double> target_vector(const ChainSpec& spec, const StateSet& s)
{
    check_selection(spec, s);
    std::vector<double> b(spec.n_transient, 0.0);
    const std::uint32_t sigma = spec.sigma_column();
    for (std::size_t i : s) {
        b[i] = spec.q[i].get(sigma);
    }
    return b;
}

}  // namespace reachmax

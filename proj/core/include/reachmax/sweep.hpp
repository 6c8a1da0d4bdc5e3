#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reachmax/synthetic.hpp"
#include "reachmax/tag_graph.hpp"

namespace reachmax {

/// Methods known to the sweep, in their default order.
const std::vector<std::string>& sweep_methods();

struct ExperimentConfig {
    /// BIPARTITE file; when empty, `instances` graphs are synthesized.
    std::optional<std::filesystem::path> dataset;
    SyntheticParams synthetic;
    std::size_t instances = 1;
    std::size_t k_max = 25;
    std::optional<double> epsilon;
    std::optional<double> sigma_weight;
    std::vector<std::string> methods = sweep_methods();
    std::uint64_t seed = 0;
    /// CSV destination; nothing is written when empty.
    std::optional<std::filesystem::path> output;
    /// Record wall times. Off by default so repeated runs give identical files.
    bool timing = false;
    /// Workers across methods; 0 reads REACHMAX_THREADS.
    std::size_t threads = 0;
};

/// Throws std::invalid_argument for k_max == 0, instances == 0 or unknown methods.
void validate_config(const ExperimentConfig& cfg);

/// FNV-1a over a canonical rendering of everything that affects the f column.
std::uint64_t config_hash(const ExperimentConfig& cfg);

struct SweepRow {
    std::string method;
    std::size_t k = 0;
    std::optional<double> f;  ///< empty marks a failed cell
    double wall_time_ms = 0.0;
    std::size_t n_evals = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    const SweepRow* find(const std::string& method, std::size_t k) const;
};

/// Rows for one graph: for every method and k = 1..k_max, f of the method's
/// k-set evaluated on the folded chain. Greedy methods run once to k_max and
/// report prefixes; n_evals is cumulative. Baselines report n_evals = 0.
/// A failing method ends with a row with empty f at the failing k; the first
/// failure is stored in `error` when given.
std::vector<SweepRow> sweep_graph(const TagGraph& g, const std::vector<std::string>& methods,
                                  std::size_t k_max, std::uint64_t seed, bool timing,
                                  std::size_t threads = 0,
                                  std::exception_ptr* error = nullptr);

/// Averages f over the instances (n_evals and wall times are summed), writes
/// the CSV when an output path is set, and rethrows the first method failure
/// after the partial result has been written.
SweepResult run_sweep(const ExperimentConfig& cfg);

/// `# key=value` metadata lines, then `method,k,f,wall_time_ms,n_evals`.
/// Failed cells read `<method>,<k>,FAILED,,`.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_csv_file(const std::filesystem::path& path, const SweepResult& result);
SweepResult read_sweep_csv(std::istream& in);

}  // namespace reachmax

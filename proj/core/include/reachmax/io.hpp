#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "reachmax/chain_model.hpp"
#include "reachmax/oracle.hpp"
#include "reachmax/tag_graph.hpp"

namespace reachmax {

// CHAIN v1
//
//   CHAIN v1
//   n_transient <n>
//   absorbing <label>... (the target carries a leading '*')
//   PI      then lines "<i> <p>"
//   QBAR    then lines "<i> <j|label> <p>"
//   Q       then lines "<i> <j|label> <p>"
//
// Transient states are numbered 1..n in the file. '#' starts a comment.
// The writer emits sorted rows with 17 significant digits.

/// Parses syntax, renormalizes rows within tolerance and validates, recording
/// everything in `report`. Throws ParseError only for malformed text.
ChainSpec read_chain(std::istream& in, ValidationReport& report);

/// As read_chain, but a row whose sum is off raises ParseError at that row's
/// first line and any other violation raises ValidationError.
ChainSpec parse_chain(std::istream& in, ValidationReport* report = nullptr);
ChainSpec parse_chain_file(const std::filesystem::path& path, ValidationReport* report = nullptr);

void write_chain(std::ostream& out, const ChainSpec& spec);
void write_chain_file(const std::filesystem::path& path, const ChainSpec& spec);
std::string chain_to_string(const ChainSpec& spec);

// BIPARTITE
//
//   EPSILON <v>
//   SIGMA_WEIGHT <v>
//   CANDIDATES <tag>...
//   TRUE_TAGS <tag>...
//   ITEM_LINK <item> <item> <weight>
//   <item>\t<tag>\t<weight>
//
// Items and tags are numbered in order of first appearance. Data lines are
// split on tabs when they contain one, otherwise on whitespace.

TagGraph parse_bipartite(std::istream& in);
TagGraph parse_bipartite_file(const std::filesystem::path& path);
void write_bipartite(std::ostream& out, const TagGraph& g);
void write_bipartite_file(const std::filesystem::path& path, const TagGraph& g);

/// Edge list: one "u v" pair per line, node labels numbered by first appearance.
struct LabeledGraph {
    SimpleGraph graph;
    std::vector<std::string> labels;
};

LabeledGraph parse_edge_list(std::istream& in);
LabeledGraph parse_edge_list_file(const std::filesystem::path& path);

/// "%.17g"
std::string format_probability(double v);

}  // namespace reachmax

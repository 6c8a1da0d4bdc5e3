#include "reachmax/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "reachmax/errors.hpp"

namespace reachmax {

namespace {

std::string strip_comment(const std::string& line)
{
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> split_ws(const std::string& line)
{
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) {
        out.push_back(tok);
    }
    return out;
}

std::string trim(const std::string& s)
{
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) {
        return {};
    }
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& tok, std::size_t line, const char* what)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError(line, std::string("malformed ") + what + " \"" + tok + "\"");
    }
    return v;
}

bool parse_index(const std::string& tok, std::size_t& out)
{
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) {
            return c >= '0' && c <= '9';
        })) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

// Line of the first entry of each row, per table.
struct RowLines {
    std::vector<std::size_t> q;
    std::vector<std::size_t> q_bar;
};

ChainSpec read_chain_impl(std::istream& in, ValidationReport& report, RowLines& lines)
{
    enum class Section { Header, Pi, QBar, Q };
    ChainSpec spec;
    bool have_n = false;
    bool have_absorbing = false;
    bool have_magic = false;
    Section section = Section::Header;
    std::set<std::string> seen_sections;
    std::map<std::string, std::size_t> label_index;
    std::vector<std::vector<SparseEntry>> q_entries;
    std::vector<std::vector<SparseEntry>> bar_entries;
    std::vector<bool> pi_seen;

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto tokens = split_ws(strip_comment(raw));
        if (tokens.empty()) {
            continue;
        }
        if (!have_magic) {
            if (tokens.size() != 2 || tokens[0] != "CHAIN" || tokens[1] != "v1") {
                throw ParseError(lineno, "expected \"CHAIN v1\"");
            }
            have_magic = true;
            continue;
        }
        if (tokens.size() == 1 && (tokens[0] == "PI" || tokens[0] == "QBAR" || tokens[0] == "Q")) {
            if (!have_n || !have_absorbing) {
                throw ParseError(lineno, "n_transient and absorbing must precede the tables");
            }
            if (!seen_sections.insert(tokens[0]).second) {
                throw ParseError(lineno, "repeated section " + tokens[0]);
            }
            section = tokens[0] == "PI" ? Section::Pi
                      : tokens[0] == "QBAR" ? Section::QBar
                                            : Section::Q;
            continue;
        }
        switch (section) {
        case Section::Header: {
            if (tokens[0] == "n_transient") {
                if (have_n || tokens.size() != 2 || !parse_index(tokens[1], spec.n_transient)) {
                    throw ParseError(lineno, "malformed n_transient line");
                }
                have_n = true;
                spec.pi.assign(spec.n_transient, 0.0);
                pi_seen.assign(spec.n_transient, false);
                q_entries.resize(spec.n_transient);
                bar_entries.resize(spec.n_transient);
                lines.q.assign(spec.n_transient, 0);
                lines.q_bar.assign(spec.n_transient, 0);
            } else if (tokens[0] == "absorbing") {
                if (have_absorbing || tokens.size() < 2) {
                    throw ParseError(lineno, "malformed absorbing line");
                }
                std::size_t targets = 0;
                for (std::size_t t = 1; t < tokens.size(); ++t) {
                    std::string label = tokens[t];
                    if (label.front() == '*') {
                        label.erase(0, 1);
                        spec.sigma = t - 1;
                        ++targets;
                    }
                    std::size_t dummy = 0;
                    if (label.empty() || parse_index(label, dummy)) {
                        throw ParseError(lineno, "absorbing labels must be non-numeric");
                    }
                    if (!label_index.emplace(label, t - 1).second) {
                        throw ParseError(lineno, "repeated absorbing label " + label);
                    }
                    spec.absorbing.push_back(label);
                }
                if (targets != 1) {
                    throw ParseError(lineno, "exactly one absorbing label must carry '*'");
                }
                have_absorbing = true;
            } else {
                throw ParseError(lineno, "unexpected \"" + tokens[0] + "\"");
            }
            break;
        }
        case Section::Pi: {
            if (tokens.size() != 2) {
                throw ParseError(lineno, "expected \"<i> <p>\"");
            }
            double p = parse_double(tokens[1], lineno, "probability");
            std::size_t i = 0;
            if (!parse_index(tokens[0], i)) {
                if (label_index.count(tokens[0]) == 0) {
                    throw ParseError(lineno, "unknown state " + tokens[0]);
                }
                if (p != 0.0) {
                    report.violations.push_back(
                        {ValidationIssue::Kind::InitialOnAbsorbing, 0, 0,
                         "pi puts mass on absorbing state " + tokens[0] + " (line " +
                             std::to_string(lineno) + ")"});
                }
                break;
            }
            if (i < 1 || i > spec.n_transient) {
                throw ParseError(lineno, "state " + tokens[0] + " out of range");
            }
            if (pi_seen[i - 1]) {
                throw ParseError(lineno, "repeated pi entry for state " + tokens[0]);
            }
            pi_seen[i - 1] = true;
            spec.pi[i - 1] = p;
            break;
        }
        case Section::QBar:
        case Section::Q: {
            if (tokens.size() != 3) {
                throw ParseError(lineno, "expected \"<i> <j|label> <p>\"");
            }
            std::size_t i = 0;
            if (!parse_index(tokens[0], i) || i < 1 || i > spec.n_transient) {
                throw ParseError(lineno, "row " + tokens[0] + " is not a transient state");
            }
            std::uint32_t col = 0;
            std::size_t j = 0;
            if (parse_index(tokens[1], j)) {
                if (j < 1 || j > spec.n_transient) {
                    throw ParseError(lineno, "column " + tokens[1] + " out of range");
                }
                col = static_cast<std::uint32_t>(j - 1);
            } else {
                auto it = label_index.find(tokens[1]);
                if (it == label_index.end()) {
                    throw ParseError(lineno, "unknown absorbing label " + tokens[1]);
                }
                col = spec.absorbing_column(it->second);
            }
            double p = parse_double(tokens[2], lineno, "probability");
            auto& rows = section == Section::Q ? q_entries : bar_entries;
            auto& first = section == Section::Q ? lines.q : lines.q_bar;
            auto& row = rows[i - 1];
            if (std::any_of(row.begin(), row.end(),
                            [col](const SparseEntry& e) { return e.col == col; })) {
                throw ParseError(lineno, "repeated entry (" + tokens[0] + ", " + tokens[1] + ")");
            }
            if (first[i - 1] == 0) {
                first[i - 1] = lineno;
            }
            row.push_back({col, p});
            break;
        }
        }
    }
    if (!have_magic) {
        throw ParseError(0, "empty input");
    }
    if (!have_n || !have_absorbing) {
        throw ParseError(lineno, "missing n_transient or absorbing line");
    }
    spec.q.resize(spec.n_transient);
    spec.q_bar.resize(spec.n_transient);
    for (std::size_t i = 0; i < spec.n_transient; ++i) {
        spec.q[i] = SparseRow(std::move(q_entries[i]));
        spec.q[i].prune();
        spec.q_bar[i] = SparseRow(std::move(bar_entries[i]));
        spec.q_bar[i].prune();
    }
    return spec;
}

}  // namespace

std::string format_probability(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ChainSpec read_chain(std::istream& in, ValidationReport& report)
{
    RowLines lines;
    ChainSpec spec = read_chain_impl(in, report, lines);
    renormalize(spec, report);
    auto checked = validate_chain(spec);
    report.violations.insert(report.violations.end(), checked.violations.begin(),
                             checked.violations.end());
    return spec;
}

ChainSpec parse_chain(std::istream& in, ValidationReport* report)
{
    ValidationReport local;
    ValidationReport& r = report ? *report : local;
    RowLines lines;
    ChainSpec spec = read_chain_impl(in, r, lines);
    renormalize(spec, r);
    auto checked = validate_chain(spec);
    for (const auto& v : checked.violations) {
        if (v.kind == ValidationIssue::Kind::RowSum) {
            bool is_q = v.message.rfind("q row", 0) == 0;
            std::size_t line = is_q ? lines.q[v.row] : lines.q_bar[v.row];
            throw ParseError(line, v.message.substr(0, v.message.find(' ')) + " row " +
                                       std::to_string(v.row + 1) + " sums to " +
                                       format_probability(spec.n_transient > v.row
                                                              ? (is_q ? spec.q : spec.q_bar)[v.row].sum()
                                                              : 0.0));
        }
    }
    r.violations.insert(r.violations.end(), checked.violations.begin(), checked.violations.end());
    if (!r.ok()) {
        throw ValidationError(r.to_string());
    }
    return spec;
}

ChainSpec parse_chain_file(const std::filesystem::path& path, ValidationReport* report)
{
    auto in = open_input(path);
    return parse_chain(in, report);
}

void write_chain(std::ostream& out, const ChainSpec& spec)
{
    auto column_name = [&spec](std::uint32_t col) {
        return col < spec.n_transient ? std::to_string(col + 1)
                                      : spec.absorbing[col - spec.n_transient];
    };
    out << "CHAIN v1\n";
    out << "n_transient " << spec.n_transient << '\n';
    out << "absorbing";
    for (std::size_t a = 0; a < spec.absorbing.size(); ++a) {
        out << ' ' << (a == spec.sigma ? "*" : "") << spec.absorbing[a];
    }
    out << '\n';
    out << "PI\n";
    for (std::size_t i = 0; i < spec.n_transient; ++i) {
        if (spec.pi[i] != 0.0) {
            out << (i + 1) << ' ' << format_probability(spec.pi[i]) << '\n';
        }
    }
    auto table = [&](const char* name, const std::vector<SparseRow>& rows) {
        out << name << '\n';
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (const auto& e : rows[i]) {
                if (e.value != 0.0) {
                    out << (i + 1) << ' ' << column_name(e.col) << ' '
                        << format_probability(e.value) << '\n';
                }
            }
        }
    };
    table("QBAR", spec.q_bar);
    table("Q", spec.q);
}

void write_chain_file(const std::filesystem::path& path, const ChainSpec& spec)
{
    auto out = open_output(path);
    write_chain(out, spec);
}

std::string chain_to_string(const ChainSpec& spec)
{
    std::ostringstream os;
    write_chain(os, spec);
    return os.str();
}

TagGraph parse_bipartite(std::istream& in)
{
    TagGraph g;
    std::unordered_map<std::string, std::size_t> tag_index;
    std::unordered_map<std::string, std::size_t> item_index;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    struct Pending {
        std::vector<std::string> names;
        std::size_t line = 0;
    };
    Pending candidates;
    Pending true_tags;
    std::vector<std::pair<std::vector<std::string>, std::size_t>> links;

    auto intern = [](std::unordered_map<std::string, std::size_t>& index,
                     std::vector<std::string>& names, const std::string& name) {
        auto [it, inserted] = index.emplace(name, names.size());
        if (inserted) {
            names.push_back(name);
        }
        return it->second;
    };

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) {
            continue;
        }
        auto tokens = split_ws(line);
        const std::string& head = tokens[0];
        if (head == "EPSILON" || head == "SIGMA_WEIGHT") {
            if (tokens.size() != 2) {
                throw ParseError(lineno, head + " takes one value");
            }
            double v = parse_double(tokens[1], lineno, "value");
            if (head == "EPSILON") {
                g.epsilon = v;
            } else {
                g.sigma_weight = v;
            }
            continue;
        }
        if (head == "CANDIDATES" || head == "TRUE_TAGS") {
            Pending& p = head == "CANDIDATES" ? candidates : true_tags;
            p.names.insert(p.names.end(), tokens.begin() + 1, tokens.end());
            p.line = lineno;
            continue;
        }
        if (head == "ITEM_LINK") {
            if (tokens.size() != 4) {
                throw ParseError(lineno, "ITEM_LINK takes <item> <item> <weight>");
            }
            links.emplace_back(std::vector<std::string>(tokens.begin() + 1, tokens.end()), lineno);
            continue;
        }

        std::vector<std::string> fields;
        if (line.find('\t') != std::string::npos) {
            std::istringstream is(line);
            std::string f;
            while (std::getline(is, f, '\t')) {
                f = trim(f);
                if (!f.empty()) {
                    fields.push_back(f);
                }
            }
        } else {
            fields = tokens;
        }
        if (fields.size() != 3) {
            throw ParseError(lineno, "expected <item> <tag> <weight>");
        }
        double w = parse_double(fields[2], lineno, "weight");
        if (!(w > 0.0)) {
            throw ParseError(lineno, "weight must be positive");
        }
        std::size_t item = intern(item_index, g.items, fields[0]);
        std::size_t tag = intern(tag_index, g.tags, fields[1]);
        if (!seen.emplace(item, tag).second) {
            throw DuplicateEdge(lineno, "duplicate edge " + fields[0] + " / " + fields[1]);
        }
        g.edges.push_back({item, tag, w});
    }

    auto resolve = [&](const Pending& p, std::vector<std::size_t>& out) {
        for (const auto& name : p.names) {
            auto it = tag_index.find(name);
            if (it == tag_index.end()) {
                throw ParseError(p.line, "unknown tag " + name);
            }
            out.push_back(it->second);
        }
    };
    resolve(candidates, g.candidates);
    resolve(true_tags, g.true_tags);
    for (const auto& [fields, line] : links) {
        auto a = item_index.find(fields[0]);
        auto b = item_index.find(fields[1]);
        if (a == item_index.end() || b == item_index.end()) {
            throw ParseError(line, "ITEM_LINK refers to an unknown item");
        }
        g.item_links.push_back({a->second, b->second, parse_double(fields[2], line, "weight")});
    }
    try {
        validate_graph(g);
    } catch (const InvalidGraph& e) {
        throw ParseError(0, e.what());
    }
    return g;
}

TagGraph parse_bipartite_file(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return parse_bipartite(in);
}

void write_bipartite(std::ostream& out, const TagGraph& g)
{
    out << "EPSILON " << format_probability(g.epsilon) << '\n';
    if (g.sigma_weight) {
        out << "SIGMA_WEIGHT " << format_probability(*g.sigma_weight) << '\n';
    }
    if (!g.candidates.empty()) {
        out << "CANDIDATES";
        for (std::size_t j : g.candidates) {
            out << ' ' << g.tags[j];
        }
        out << '\n';
    }
    if (!g.true_tags.empty()) {
        out << "TRUE_TAGS";
        for (std::size_t j : g.true_tags) {
            out << ' ' << g.tags[j];
        }
        out << '\n';
    }
    for (const auto& e : g.edges) {
        out << g.items[e.item] << '\t' << g.tags[e.tag] << '\t' << format_probability(e.weight)
            << '\n';
    }
    for (const auto& l : g.item_links) {
        out << "ITEM_LINK " << g.items[l.from] << ' ' << g.items[l.to] << ' '
            << format_probability(l.weight) << '\n';
    }
}

void write_bipartite_file(const std::filesystem::path& path, const TagGraph& g)
{
    auto out = open_output(path);
    write_bipartite(out, g);
}

LabeledGraph parse_edge_list(std::istream& in)
{
    LabeledGraph lg;
    std::unordered_map<std::string, std::size_t> index;
    auto node = [&](const std::string& label) {
        auto [it, inserted] = index.emplace(label, lg.labels.size());
        if (inserted) {
            lg.labels.push_back(label);
        }
        return it->second;
    };
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto tokens = split_ws(strip_comment(raw));
        if (tokens.empty()) {
            continue;
        }
        if (tokens.size() != 2) {
            throw ParseError(lineno, "expected \"u v\"");
        }
        std::size_t u = node(tokens[0]);
        std::size_t v = node(tokens[1]);
        lg.graph.edges.emplace_back(u, v);
    }
    lg.graph.n = lg.labels.size();
    return lg;
}

LabeledGraph parse_edge_list_file(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return parse_edge_list(in);
}

}  // namespace reachmax

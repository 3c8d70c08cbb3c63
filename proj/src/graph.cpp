#include "adngcl/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "adngcl/errors.hpp"
#include "adngcl/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace adngcl {

void normalize_edge_list(EdgeList& edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

namespace {

std::ifstream open_or_throw(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw config_error("missing or unreadable file: " + p.string());
    return in;
}

long parse_long(const std::string& tok, const std::string& where) {
    long v = 0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw config_error("non-numeric value '" + tok + "' in " + where);
    return v;
}

double parse_double(const std::string& tok, const std::string& where) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        if (!std::isfinite(v)) throw config_error("non-finite value in " + where);
        return v;
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        throw config_error("non-numeric value '" + tok + "' in " + where);
    }
}

std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    return out;
}

std::string trimmed(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && issp(s[b])) ++b;
    return s.substr(b);
}

}  // namespace

Graph load_graph(const std::string& dir_path) {
    const fs::path dir(dir_path);

    json meta;
    {
        auto in = open_or_throw(dir / "meta.json");
        try {
            in >> meta;
        } catch (const json::exception& e) {
            throw config_error(std::string("meta.json parse error: ") + e.what());
        }
    }
    for (const char* key : {"num_nodes", "num_features", "num_classes"}) {
        if (!meta.contains(key) || !meta[key].is_number_integer())
            throw config_error(std::string("meta.json: missing integer key '") + key + "'");
    }
    const long n = meta["num_nodes"].get<long>();
    const long d = meta["num_features"].get<long>();
    const long c = meta["num_classes"].get<long>();
    if (n <= 0 || d <= 0 || c <= 0) throw config_error("meta.json: dimensions must be positive");

    Graph g;
    g.num_nodes = static_cast<std::size_t>(n);
    g.num_classes = static_cast<std::size_t>(c);

    // edges.tsv: one "i<TAB>j" per line; self-loop and duplicate lines are
    // dropped after canonicalization.
    {
        auto in = open_or_throw(dir / "edges.tsv");
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            line = trimmed(line);
            if (line.empty()) continue;
            auto toks = split_on(line, '\t');
            if (toks.size() != 2)
                throw config_error("edges.tsv line " + std::to_string(lineno) +
                                   ": expected two tab-separated indices");
            const long a = parse_long(trimmed(toks[0]), "edges.tsv line " + std::to_string(lineno));
            const long b = parse_long(trimmed(toks[1]), "edges.tsv line " + std::to_string(lineno));
            if (a < 0 || a >= n || b < 0 || b >= n)
                throw config_error("edges.tsv line " + std::to_string(lineno) +
                                   ": node index out of range [0," + std::to_string(n) + ")");
            if (a == b) continue;
            g.edges.push_back(canonical_edge(static_cast<NodeId>(a), static_cast<NodeId>(b)));
        }
        normalize_edge_list(g.edges);
    }

    // features.csv: n lines of d comma-separated reals.
    {
        auto in = open_or_throw(dir / "features.csv");
        g.features = Matrix(g.num_nodes, static_cast<std::size_t>(d));
        std::string line;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            line = trimmed(line);
            if (line.empty()) continue;
            if (row >= g.num_nodes)
                throw config_error("features.csv: more rows than meta.json num_nodes");
            auto toks = split_on(line, ',');
            if (toks.size() != static_cast<std::size_t>(d))
                throw config_error("features.csv row " + std::to_string(row) + ": expected " +
                                   std::to_string(d) + " columns, got " + std::to_string(toks.size()));
            for (std::size_t j = 0; j < toks.size(); ++j)
                g.features(row, j) = parse_double(trimmed(toks[j]),
                                                  "features.csv row " + std::to_string(row));
            ++row;
        }
        if (row != g.num_nodes)
            throw config_error("features.csv: expected " + std::to_string(n) + " rows, got " +
                               std::to_string(row));
    }

    // labels.csv: n lines, one class index per line.
    {
        auto in = open_or_throw(dir / "labels.csv");
        g.labels.reserve(g.num_nodes);
        std::string line;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            line = trimmed(line);
            if (line.empty()) continue;
            if (row >= g.num_nodes)
                throw config_error("labels.csv: more rows than meta.json num_nodes");
            const long y = parse_long(line, "labels.csv row " + std::to_string(row));
            if (y < 0 || y >= c)
                throw config_error("labels.csv row " + std::to_string(row) + ": label " +
                                   std::to_string(y) + " out of range [0," + std::to_string(c) + ")");
            g.labels.push_back(static_cast<int>(y));
            ++row;
        }
        if (row != g.num_nodes)
            throw config_error("labels.csv: expected " + std::to_string(n) + " rows, got " +
                               std::to_string(row));
    }

    return g;
}

Graph generate_sbm(std::size_t n, std::size_t num_classes, double p_in, double p_out,
                   std::size_t d, double feature_shift, std::uint64_t seed) {
    if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0 && p_out <= p_in))
        throw config_error("generate_sbm: need 0 <= p_out <= p_in <= 1");
    if (num_classes == 0 || n == 0 || n % num_classes != 0)
        throw config_error("generate_sbm: n must be a positive multiple of num_classes");
    if (d == 0) throw config_error("generate_sbm: d must be positive");

    Graph g;
    g.num_nodes = n;
    g.num_classes = num_classes;
    g.labels.resize(n);
    const std::size_t block = n / num_classes;
    for (std::size_t i = 0; i < n; ++i) g.labels[i] = static_cast<int>(i / block);

    auto rng = make_stream(seed, stream_tag::sbm);

    // Edges first, then features; the draw order is part of the
    // determinism contract.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = (g.labels[i] == g.labels[j]) ? p_in : p_out;
            if (unif(rng) < p) g.edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
        }
    }

    g.features = Matrix(n, d);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) g.features(i, j) = gauss(rng);

    // Class-specific mean shift on a contiguous coordinate block (d/C wide;
    // trailing d mod C coordinates stay unshifted).
    const std::size_t width = d / num_classes;
    if (width > 0 && feature_shift != 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t start = static_cast<std::size_t>(g.labels[i]) * width;
            for (std::size_t j = start; j < start + width; ++j) g.features(i, j) += feature_shift;
        }
    }

    return g;
}

SplitMasks make_splits(const Graph& g, std::uint64_t seed) {
    const std::size_t n = g.num_nodes;
    if (n < 10) throw config_error("make_splits: need at least 10 nodes");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    auto rng = make_stream(seed, stream_tag::split);
    std::shuffle(perm.begin(), perm.end(), rng);

    const std::size_t n_train = n / 10;
    const std::size_t n_val = n / 10;

    SplitMasks m;
    m.train.assign(n, 0);
    m.val.assign(n, 0);
    m.test.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        if (k < n_train)
            m.train[perm[k]] = 1;
        else if (k < n_train + n_val)
            m.val[perm[k]] = 1;
        else
            m.test[perm[k]] = 1;
    }
    return m;
}

std::vector<std::vector<NodeId>> adjacency_lists(const Graph& g) {
    std::vector<std::vector<NodeId>> adj(g.num_nodes);
    for (const auto& [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

}  // namespace adngcl

#include "silencer/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "silencer/errors.hpp"
#include "silencer/random.hpp"

namespace silencer {

long Graph::edge_count() const {
    double s = adjacency.sum();
    return static_cast<long>(std::llround(s / 2.0));
}

void Graph::validate() const {
    if (adjacency.rows() != adjacency.cols())
        throw ValidationError("adjacency matrix must be square");
    if ((adjacency.array() < 0.0).any())
        throw ValidationError("adjacency entries must be nonnegative");
    if (symmetric && adjacency != adjacency.transpose().eval())
        throw ValidationError("adjacency marked symmetric but is not");
    if (binary) {
        if (((adjacency.array() != 0.0) && (adjacency.array() != 1.0)).any())
            throw ValidationError("adjacency marked binary but has entries outside {0,1}");
        if (adjacency.diagonal().any())
            throw ValidationError("binary graph must have a zero diagonal");
    }
}

void LayerConfig::validate(int n) const {
    if (sizes.size() < 2)
        throw ValidationError("layer config needs at least [n, k]");
    if (sizes.front() != n)
        throw ValidationError("layer config r_0 must equal the graph's node count");
    for (size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] <= 0)
            throw ValidationError("layer sizes must be positive");
        if (i > 0 && sizes[i] > sizes[i - 1])
            throw ValidationError("layer sizes must be non-increasing");
    }
}

namespace {

struct RawEdge {
    long u, v;
};

std::vector<RawEdge> parse_edge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open edge list: " + path);
    std::vector<RawEdge> edges;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        long u, v;
        if (!(ss >> u)) continue;  // blank or comment-only line
        std::string rest;
        if (!(ss >> v) || (ss >> rest) || u < 0 || v < 0)
            throw ValidationError("malformed edge at " + path + ":" + std::to_string(line_no));
        if (u == v)
            throw ValidationError("self-loop at " + path + ":" + std::to_string(line_no));
        edges.push_back({u, v});
    }
    return edges;
}

}  // namespace

Graph load_edge_list(const std::string& path, std::optional<int> n_hint) {
    auto raw = parse_edge_file(path);

    std::set<long> ids;
    for (const auto& e : raw) {
        ids.insert(e.u);
        ids.insert(e.v);
    }
    if (raw.empty() && !n_hint)
        throw ValidationError("empty edge list and no node-count hint: " + path);

    // Ids starting at 0 are taken as-is; 1-based or sparse ids are remapped
    // densely in sorted order, with the map persisted as a sidecar file.
    std::map<long, int> remap;
    bool need_remap = !ids.empty() && *ids.begin() > 0;
    if (need_remap) {
        int next = 0;
        for (long id : ids) remap[id] = next++;
        std::ofstream out(path + ".idmap");
        for (const auto& [orig, dense] : remap)
            out << orig << ' ' << dense << '\n';
    }

    long max_id = -1;
    for (const auto& e : raw) {
        long u = need_remap ? remap[e.u] : e.u;
        long v = need_remap ? remap[e.v] : e.v;
        max_id = std::max({max_id, u, v});
    }
    int n = static_cast<int>(max_id + 1);
    if (n_hint && *n_hint > n) n = *n_hint;

    Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(n, n);
    g.symmetric = true;
    g.binary = true;
    for (const auto& e : raw) {
        int u = static_cast<int>(need_remap ? remap[e.u] : e.u);
        int v = static_cast<int>(need_remap ? remap[e.v] : e.v);
        g.adjacency(u, v) = 1.0;
        g.adjacency(v, u) = 1.0;
    }
    return g;
}

void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write edge list: " + path);
    const int n = g.n();
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (g.adjacency(u, v) != 0.0) out << u << ' ' << v << '\n';
}

Partition load_labels(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open label file: " + path);
    std::vector<long> raw(n);
    std::vector<bool> seen(n, false);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        long node, label;
        if (!(ss >> node)) continue;
        if (!(ss >> label))
            throw ValidationError("malformed label at " + path + ":" + std::to_string(line_no));
        if (node < 0 || node >= n)
            throw ValidationError("node id out of range at " + path + ":" + std::to_string(line_no));
        if (seen[node])
            throw ValidationError("duplicate node at " + path + ":" + std::to_string(line_no));
        seen[node] = true;
        raw[node] = label;
    }
    for (int i = 0; i < n; ++i)
        if (!seen[i])
            throw ValidationError("missing label for node " + std::to_string(i) + " in " + path);

    // Dense re-indexing in order of label value.
    std::map<long, int> dense;
    for (long lab : std::set<long>(raw.begin(), raw.end()))
        dense[lab] = static_cast<int>(dense.size());
    Partition part;
    part.labels.resize(n);
    for (int i = 0; i < n; ++i) part.labels[i] = dense[raw[i]];
    part.k = static_cast<int>(dense.size());
    return part;
}

void save_labels(const Partition& part, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write label file: " + path);
    for (size_t i = 0; i < part.labels.size(); ++i) out << i << ' ' << part.labels[i] << '\n';
}

void save_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write matrix: " + path);
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open matrix: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ValidationError("ragged CSV matrix: " + path);
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

DegreeLaplacian laplacian(const Graph& g) {
    DegreeLaplacian dl;
    dl.degrees = g.adjacency.rowwise().sum();
    dl.laplacian = Eigen::MatrixXd(dl.degrees.asDiagonal());
    dl.laplacian -= g.adjacency;
    return dl;
}

Graph generate_er(int n, double p_conn, std::uint64_t seed) {
    if (n <= 0) throw ValidationError("generate_er: n must be positive");
    if (p_conn < 0.0 || p_conn > 1.0) throw ValidationError("generate_er: p out of [0,1]");
    Rng rng(seed);
    Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(n, n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (uniform01(rng) < p_conn) g.adjacency(u, v) = g.adjacency(v, u) = 1.0;
    return g;
}

Graph generate_ws(int n, int k_neighbors, double p_rewire, std::uint64_t seed) {
    if (n <= 0) throw ValidationError("generate_ws: n must be positive");
    if (k_neighbors <= 0 || k_neighbors % 2 != 0 || k_neighbors >= n)
        throw ValidationError("generate_ws: k_neighbors must be even and in (0, n)");
    if (p_rewire < 0.0 || p_rewire > 1.0) throw ValidationError("generate_ws: p out of [0,1]");
    Rng rng(seed);
    Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(n, n);
    auto& a = g.adjacency;
    for (int u = 0; u < n; ++u)
        for (int j = 1; j <= k_neighbors / 2; ++j) {
            int v = (u + j) % n;
            a(u, v) = a(v, u) = 1.0;
        }
    // Rewire each lattice edge (u, u+j) to (u, random) with probability p.
    for (int j = 1; j <= k_neighbors / 2; ++j)
        for (int u = 0; u < n; ++u) {
            int v = (u + j) % n;
            if (uniform01(rng) >= p_rewire) continue;
            if (a(u, v) == 0.0) continue;  // already rewired away
            // Skip if u is connected to everyone else.
            if (a.row(u).sum() >= n - 1) continue;
            int w;
            do {
                w = static_cast<int>(uniform_index(rng, n));
            } while (w == u || a(u, w) != 0.0);
            a(u, v) = a(v, u) = 0.0;
            a(u, w) = a(w, u) = 1.0;
        }
    return g;
}

Graph generate_ba(int n, int m_edges, std::uint64_t seed) {
    if (m_edges <= 0) throw ValidationError("generate_ba: m_edges must be positive");
    if (n <= m_edges) throw ValidationError("generate_ba: n must exceed m_edges");
    Rng rng(seed);
    Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(n, n);
    auto& a = g.adjacency;

    // Seed core: star over the first m_edges + 1 nodes.
    int n0 = m_edges + 1;
    std::vector<int> targets;  // nodes repeated by degree
    for (int v = 1; v < n0; ++v) {
        a(0, v) = a(v, 0) = 1.0;
        targets.push_back(0);
        targets.push_back(v);
    }
    for (int u = n0; u < n; ++u) {
        std::set<int> chosen;
        while (static_cast<int>(chosen.size()) < m_edges) {
            int v = targets[uniform_index(rng, targets.size())];
            if (v != u) chosen.insert(v);
        }
        for (int v : chosen) {
            a(u, v) = a(v, u) = 1.0;
            targets.push_back(u);
            targets.push_back(v);
        }
    }
    return g;
}

}  // namespace silencer

#ifndef SILENCER_GRAPH_HPP
#define SILENCER_GRAPH_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace silencer {

/// Dense nonnegative adjacency matrix plus the flags the solvers care about.
/// A binary graph is simple: entries in {0,1}, zero diagonal.
struct Graph {
    Eigen::MatrixXd adjacency;
    bool symmetric = true;
    bool binary = true;

    int n() const { return static_cast<int>(adjacency.rows()); }

    /// Number of undirected edges (binary symmetric graphs only).
    long edge_count() const;

    /// Checks the invariants implied by the flags; throws ValidationError.
    void validate() const;
};

/// Per-node community labels, ids dense in [0, k).
struct Partition {
    std::vector<int> labels;
    int k = 0;
};

/// Layer size chain n = r_0 >= r_1 >= ... >= r_p = k.
struct LayerConfig {
    std::vector<int> sizes;

    int depth() const { return static_cast<int>(sizes.size()) - 1; }
    int input_dim() const { return sizes.front(); }
    int rank() const { return sizes.back(); }
    void validate(int n) const;
};

struct DegreeLaplacian {
    Eigen::VectorXd degrees;   // diagonal of D
    Eigen::MatrixXd laplacian; // L = D - A
};

/// Reads "u v" pairs, one per line, '#' comments allowed. Duplicate edges
/// collapse, self-loops are rejected. Ids that are not 0-based are remapped
/// to dense ids in sorted order and the map is persisted to <path>.idmap.
Graph load_edge_list(const std::string& path, std::optional<int> n_hint = std::nullopt);

/// Canonical form: sorted unique "u v" lines with u < v.
void save_edge_list(const Graph& g, const std::string& path);

/// Reads "node_id label_id" lines; labels re-indexed densely to [0, k).
/// Every node in [0, n) must appear exactly once.
Partition load_labels(const std::string& path, int n);

void save_labels(const Partition& part, const std::string& path);

/// Dense CSV matrix (row-major, full precision), used for mixed-noise output.
void save_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd load_matrix_csv(const std::string& path);

DegreeLaplacian laplacian(const Graph& g);

/// Erdos-Renyi G(n, p): each of the n(n-1)/2 pairs is an edge independently.
Graph generate_er(int n, double p_conn, std::uint64_t seed);

/// Watts-Strogatz: ring lattice with k_neighbors per node, each lattice edge
/// rewired with probability p_rewire. Edge count n*k_neighbors/2 is preserved.
Graph generate_ws(int n, int k_neighbors, double p_rewire, std::uint64_t seed);

/// Barabasi-Albert preferential attachment, m_edges new edges per node.
Graph generate_ba(int n, int m_edges, std::uint64_t seed);

}  // namespace silencer

#endif

// Seeded planted-partition fixtures for the heavier suites. Community sizes
// are as equal as possible; each within-community pair is an edge with
// probability p_in, each cross pair with p_out.
#ifndef SILENCER_TEST_SUPPORT_HPP
#define SILENCER_TEST_SUPPORT_HPP

#include "silencer/graph.hpp"
#include "silencer/random.hpp"

namespace support {

inline silencer::Graph planted_partition(int n, int k, double p_in, double p_out,
                                         std::uint64_t seed, silencer::Partition* truth) {
    silencer::Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i * k / n;  // contiguous, near-equal blocks

    silencer::Rng rng(silencer::mix_seed(seed));
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double p = labels[u] == labels[v] ? p_in : p_out;
            if (silencer::uniform01(rng) < p) g.adjacency(u, v) = g.adjacency(v, u) = 1.0;
        }
    if (truth) *truth = silencer::Partition{std::move(labels), k};
    return g;
}

// Stand-ins sized like the classic benchmarks (n, k, and roughly |E|).
inline silencer::Graph polbooks_like(silencer::Partition* truth, std::uint64_t seed = 2024) {
    return planted_partition(105, 3, 0.19, 0.027, seed, truth);
}

inline silencer::Graph football_like(silencer::Partition* truth, std::uint64_t seed = 2025) {
    return planted_partition(115, 12, 0.70, 0.041, seed, truth);
}

inline silencer::Graph email_like(silencer::Partition* truth, std::uint64_t seed = 2026) {
    return planted_partition(1005, 42, 0.36, 0.045, seed, truth);
}

}  // namespace support

#endif

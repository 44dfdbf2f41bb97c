#ifndef SILENCER_NOISE_HPP
#define SILENCER_NOISE_HPP

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "silencer/graph.hpp"

namespace silencer {

struct GaParams {
    int population_size = 100;
    int generations = 200;
    double crossover_rate = 0.8;
    double mutation_rate = 0.1;
    int elite_count = 2;

    void validate() const;
};

struct NoiseSpec {
    enum class Kind { Random, QAttack, Mixed };

    Kind kind = Kind::Random;
    double p = 0.0;                  // flip probability (Random)
    double budget_fraction = 0.05;   // fraction of |E| (QAttack)
    GaParams ga;
    int rank = 2;                    // NMF rank (Mixed)
    std::shared_ptr<NoiseSpec> base; // optional pre-noise for Mixed
    std::uint64_t seed = 0;

    static NoiseSpec random(double p, std::uint64_t seed);
    static NoiseSpec qattack(double budget_fraction, const GaParams& ga, std::uint64_t seed);
    static NoiseSpec mixed(std::shared_ptr<NoiseSpec> base, int rank, std::uint64_t seed);
};

/// What a perturbation did to the graph, for provenance records.
struct PerturbationRecord {
    std::vector<std::pair<int, int>> removed;
    std::vector<std::pair<int, int>> added;
};

/// Independent uniform draw q per unordered pair; the pair flips iff q <= p.
Graph perturb_random(const Graph& g, double p, std::uint64_t seed,
                     PerturbationRecord* record = nullptr);

/// Agglomerative modularity maximization from singletons; merges the pair
/// with the largest gain (ties: lowest community-id pair) until no positive
/// gain remains.
Partition greedy_modularity_partition(const Graph& g);

/// Modularity-minimizing rewiring attack: a GA over plans of exactly b edge
/// deletions paired with b additions, b = round(budget_fraction * |E|).
/// Fitness is the greedy modularity of the rewired graph. |E| is preserved.
Graph qattack(const Graph& g, double budget_fraction, const GaParams& ga,
              std::uint64_t seed, PerturbationRecord* record = nullptr);

/// Mixed noise: apply base noise (if any), fit plain NMF at the given rank
/// with lambda = 0, return the reconstruction U*V as a weighted graph.
Graph perturb_mixed(const Graph& g, const NoiseSpec* base, int rank, std::uint64_t seed,
                    PerturbationRecord* record = nullptr);

/// Dispatch on spec.kind with the spec's own parameters and the given seed.
Graph apply_noise(const Graph& g, const NoiseSpec& spec, std::uint64_t seed,
                  PerturbationRecord* record = nullptr);

}  // namespace silencer

#endif

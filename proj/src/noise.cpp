#include "silencer/noise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "silencer/errors.hpp"
#include "silencer/factorization.hpp"
#include "silencer/metrics.hpp"
#include "silencer/random.hpp"

namespace silencer {

void GaParams::validate() const {
    if (population_size < 2) throw ValidationError("GA: population_size must be >= 2");
    if (elite_count < 0 || elite_count >= population_size)
        throw ValidationError("GA: elite_count must be < population_size");
    if (generations < 1) throw ValidationError("GA: generations must be >= 1");
    if (crossover_rate < 0.0 || crossover_rate > 1.0 || mutation_rate < 0.0 || mutation_rate > 1.0)
        throw ValidationError("GA: rates must lie in [0,1]");
}

NoiseSpec NoiseSpec::random(double p, std::uint64_t seed) {
    NoiseSpec s;
    s.kind = Kind::Random;
    s.p = p;
    s.seed = seed;
    return s;
}

NoiseSpec NoiseSpec::qattack(double budget_fraction, const GaParams& ga, std::uint64_t seed) {
    NoiseSpec s;
    s.kind = Kind::QAttack;
    s.budget_fraction = budget_fraction;
    s.ga = ga;
    s.seed = seed;
    return s;
}

NoiseSpec NoiseSpec::mixed(std::shared_ptr<NoiseSpec> base, int rank, std::uint64_t seed) {
    NoiseSpec s;
    s.kind = Kind::Mixed;
    s.base = std::move(base);
    s.rank = rank;
    s.seed = seed;
    return s;
}

Graph perturb_random(const Graph& g, double p, std::uint64_t seed, PerturbationRecord* record) {
    if (p < 0.0 || p > 1.0) throw ValidationError("perturb_random: p out of [0,1]");
    if (!g.binary || !g.symmetric)
        throw ValidationError("perturb_random: graph must be binary and symmetric");
    Rng rng(seed);
    Graph out = g;
    const int n = g.n();
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double q = uniform01(rng);
            if (q <= p) {
                bool had = out.adjacency(u, v) != 0.0;
                double flipped = had ? 0.0 : 1.0;
                out.adjacency(u, v) = out.adjacency(v, u) = flipped;
                if (record) {
                    if (had)
                        record->removed.emplace_back(u, v);
                    else
                        record->added.emplace_back(u, v);
                }
            }
        }
    return out;
}

Partition greedy_modularity_partition(const Graph& g) {
    const int n = g.n();
    Eigen::VectorXd deg = g.adjacency.rowwise().sum();
    const double two_m = deg.sum();
    if (two_m <= 0.0) throw ValidationError("greedy modularity: graph has no edges");

    // Community state: w[c][d] = sum of A over (i in c, j in d), c != d.
    std::vector<std::map<int, double>> w(n);
    std::vector<double> total(n);   // degree mass per community
    std::vector<bool> alive(n, true);
    for (int i = 0; i < n; ++i) {
        total[i] = deg(i);
        for (int j = 0; j < n; ++j)
            if (j != i && g.adjacency(i, j) != 0.0) w[i][j] = g.adjacency(i, j);
    }

    std::vector<int> comm(n);
    std::iota(comm.begin(), comm.end(), 0);

    while (true) {
        double best_gain = 0.0;
        int best_c = -1, best_d = -1;
        for (int c = 0; c < n; ++c) {
            if (!alive[c]) continue;
            for (const auto& [d, wcd] : w[c]) {
                if (d <= c) continue;  // each pair once; lowest pair wins ties
                double gain = 2.0 * wcd / two_m - 2.0 * (total[c] / two_m) * (total[d] / two_m);
                if (gain > best_gain + 1e-15) {
                    best_gain = gain;
                    best_c = c;
                    best_d = d;
                }
            }
        }
        if (best_c < 0) break;

        // Merge best_d into best_c (the lower id survives).
        for (const auto& [e, wde] : w[best_d]) {
            if (e == best_c) continue;
            w[best_c][e] += wde;
            w[e][best_c] += wde;
            w[e].erase(best_d);
        }
        w[best_c].erase(best_d);
        total[best_c] += total[best_d];
        alive[best_d] = false;
        w[best_d].clear();
        for (int i = 0; i < n; ++i)
            if (comm[i] == best_d) comm[i] = best_c;
    }

    // Relabel densely in order of surviving community id.
    std::map<int, int> dense;
    for (int c = 0; c < n; ++c)
        if (alive[c]) dense[c] = static_cast<int>(dense.size());
    Partition part;
    part.labels.resize(n);
    for (int i = 0; i < n; ++i) part.labels[i] = dense[comm[i]];
    part.k = static_cast<int>(dense.size());
    return part;
}

namespace {

using EdgeList = std::vector<std::pair<int, int>>;

struct AttackPlan {
    std::vector<int> del_idx;  // indices into the original edge list
    EdgeList adds;             // non-edges of the original graph
    double fitness = 0.0;
};

Graph apply_plan(const Graph& g, const EdgeList& edges, const AttackPlan& plan) {
    Graph out = g;
    for (int idx : plan.del_idx) {
        auto [u, v] = edges[idx];
        out.adjacency(u, v) = out.adjacency(v, u) = 0.0;
    }
    for (auto [u, v] : plan.adds) out.adjacency(u, v) = out.adjacency(v, u) = 1.0;
    return out;
}

std::pair<int, int> sample_non_edge(const Graph& g, Rng& rng) {
    const int n = g.n();
    for (int tries = 0; tries < 100000; ++tries) {
        int u = static_cast<int>(uniform_index(rng, n));
        int v = static_cast<int>(uniform_index(rng, n));
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (g.adjacency(u, v) == 0.0) return {u, v};
    }
    throw ValidationError("qattack: could not sample a non-edge");
}

// Enforce distinct deletions and distinct non-edge additions.
void repair(AttackPlan& plan, const Graph& g, const EdgeList& edges, int budget, Rng& rng) {
    std::set<int> dels(plan.del_idx.begin(), plan.del_idx.end());
    while (static_cast<int>(dels.size()) < budget)
        dels.insert(static_cast<int>(uniform_index(rng, edges.size())));
    plan.del_idx.assign(dels.begin(), dels.end());

    std::set<std::pair<int, int>> adds(plan.adds.begin(), plan.adds.end());
    while (static_cast<int>(adds.size()) < budget) adds.insert(sample_non_edge(g, rng));
    while (static_cast<int>(adds.size()) > budget) adds.erase(std::prev(adds.end()));
    plan.adds.assign(adds.begin(), adds.end());
}

}  // namespace

Graph qattack(const Graph& g, double budget_fraction, const GaParams& ga, std::uint64_t seed,
              PerturbationRecord* record) {
    ga.validate();
    if (!g.binary || !g.symmetric)
        throw ValidationError("qattack: graph must be binary and symmetric");

    EdgeList edges;
    const int n = g.n();
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (g.adjacency(u, v) != 0.0) edges.emplace_back(u, v);

    const int budget = static_cast<int>(std::llround(budget_fraction * edges.size()));
    if (budget < 1) throw ValidationError("qattack: budget rounds to zero edges");
    const long non_edges = static_cast<long>(n) * (n - 1) / 2 - static_cast<long>(edges.size());
    if (non_edges < budget) throw ValidationError("qattack: not enough non-edges to add");

    Rng rng(seed);
    auto evaluate = [&](AttackPlan& plan) {
        Graph attacked = apply_plan(g, edges, plan);
        plan.fitness = modularity(attacked, greedy_modularity_partition(attacked));
    };

    std::vector<AttackPlan> pop(ga.population_size);
    for (auto& plan : pop) {
        repair(plan, g, edges, budget, rng);
        evaluate(plan);
    }
    auto by_fitness = [](const AttackPlan& a, const AttackPlan& b) {
        return a.fitness < b.fitness;  // lower modularity is better
    };

    for (int gen = 0; gen < ga.generations; ++gen) {
        std::stable_sort(pop.begin(), pop.end(), by_fitness);
        std::vector<AttackPlan> next(pop.begin(), pop.begin() + ga.elite_count);

        auto tournament = [&]() -> const AttackPlan& {
            const AttackPlan& a = pop[uniform_index(rng, pop.size())];
            const AttackPlan& b = pop[uniform_index(rng, pop.size())];
            return a.fitness <= b.fitness ? a : b;
        };

        while (static_cast<int>(next.size()) < ga.population_size) {
            AttackPlan child = tournament();
            if (uniform01(rng) < ga.crossover_rate) {
                const AttackPlan& other = tournament();
                // Uniform crossover over plan positions, then repair.
                for (int j = 0; j < budget; ++j) {
                    if (uniform01(rng) < 0.5) child.del_idx[j] = other.del_idx[j];
                    if (uniform01(rng) < 0.5) child.adds[j] = other.adds[j];
                }
            }
            for (int j = 0; j < budget; ++j) {
                if (uniform01(rng) < ga.mutation_rate)
                    child.del_idx[j] = static_cast<int>(uniform_index(rng, edges.size()));
                if (uniform01(rng) < ga.mutation_rate) child.adds[j] = sample_non_edge(g, rng);
            }
            repair(child, g, edges, budget, rng);
            evaluate(child);
            next.push_back(std::move(child));
        }
        pop = std::move(next);
    }

    const AttackPlan& best = *std::min_element(pop.begin(), pop.end(), by_fitness);
    if (record) {
        for (int idx : best.del_idx) record->removed.push_back(edges[idx]);
        record->added = best.adds;
    }
    return apply_plan(g, edges, best);
}

Graph perturb_mixed(const Graph& g, const NoiseSpec* base, int rank, std::uint64_t seed,
                    PerturbationRecord* record) {
    if (rank < 1 || rank > g.n()) throw ValidationError("perturb_mixed: rank out of [1, n]");
    Graph staged = base ? apply_noise(g, *base, derive_seed(seed, 1), record) : g;

    SolverOptions opts;
    opts.lambda = 0.0;
    opts.seed = derive_seed(seed, 2);
    auto [pair, report] = nmf_fit(staged, rank, opts);

    Graph out;
    out.adjacency = pair.U * pair.V;
    out.symmetric = false;
    out.binary = false;
    return out;
}

Graph apply_noise(const Graph& g, const NoiseSpec& spec, std::uint64_t seed,
                  PerturbationRecord* record) {
    switch (spec.kind) {
        case NoiseSpec::Kind::Random:
            return perturb_random(g, spec.p, seed, record);
        case NoiseSpec::Kind::QAttack:
            return qattack(g, spec.budget_fraction, spec.ga, seed, record);
        case NoiseSpec::Kind::Mixed:
            return perturb_mixed(g, spec.base.get(), spec.rank, seed, record);
    }
    throw ValidationError("apply_noise: unknown noise kind");
}

}  // namespace silencer

#include <doctest.h>

#include "oracles.hpp"
#include "silencer/errors.hpp"
#include "silencer/metrics.hpp"
#include "silencer/noise.hpp"

using namespace silencer;

namespace {

Graph dyads() {
    Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(4, 4);
    g.adjacency(0, 1) = g.adjacency(1, 0) = 1.0;
    g.adjacency(2, 3) = g.adjacency(3, 2) = 1.0;
    return g;
}

Graph two_triangles() {
    Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(6, 6);
    auto link = [&](int u, int v) { g.adjacency(u, v) = g.adjacency(v, u) = 1.0; };
    link(0, 1);
    link(1, 2);
    link(0, 2);
    link(3, 4);
    link(4, 5);
    link(3, 5);
    return g;
}

GaParams small_ga() {
    GaParams ga;
    ga.population_size = 20;
    ga.generations = 15;
    return ga;
}

}  // namespace

TEST_CASE("perturb_random: p=0 identity, p=1 complement") {
    Graph g = generate_er(25, 0.3, 3);
    Graph same = perturb_random(g, 0.0, 99);
    CHECK(same.adjacency == g.adjacency);

    Graph comp = perturb_random(g, 1.0, 99);
    comp.validate();
    for (int u = 0; u < 25; ++u)
        for (int v = 0; v < 25; ++v) {
            if (u == v) continue;
            CHECK(comp.adjacency(u, v) == 1.0 - g.adjacency(u, v));
        }
}

TEST_CASE("perturb_random keeps the graph simple and is replayable") {
    Graph g = generate_er(30, 0.2, 5);
    PerturbationRecord rec;
    Graph noisy = perturb_random(g, 0.1, 123, &rec);
    noisy.validate();
    CHECK(perturb_random(g, 0.1, 123).adjacency == noisy.adjacency);

    // differing pairs match the record exactly
    int diffs = 0;
    for (int u = 0; u < 30; ++u)
        for (int v = u + 1; v < 30; ++v)
            if (noisy.adjacency(u, v) != g.adjacency(u, v)) ++diffs;
    CHECK(diffs == static_cast<int>(rec.added.size() + rec.removed.size()));
}

TEST_CASE("greedy modularity: block-diagonal optimum on disjoint cliques") {
    Partition p = greedy_modularity_partition(two_triangles());
    CHECK(p.k == 2);
    CHECK(p.labels[0] == p.labels[1]);
    CHECK(p.labels[0] == p.labels[2]);
    CHECK(p.labels[3] == p.labels[4]);
    CHECK(p.labels[0] != p.labels[3]);
}

TEST_CASE("greedy modularity on K2 u K2 reaches Q = 0.5") {
    Graph g = dyads();
    Partition p = greedy_modularity_partition(g);
    CHECK(modularity(g, p) == doctest::Approx(0.5));
}

TEST_CASE("greedy modularity Q is self-consistent and decent on karate") {
    Graph g = load_edge_list(std::string(TEST_DATA_DIR) + "/karate.edges");
    Partition p = greedy_modularity_partition(g);
    double q = modularity(g, p);
    CHECK(q >= 0.35);
    CHECK(q == doctest::Approx(oracles::modularity_oracle(g.adjacency, p.labels)).epsilon(1e-12));
}

TEST_CASE("greedy modularity rejects the edgeless graph") {
    Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(3, 3);
    CHECK_THROWS_AS(greedy_modularity_partition(g), ValidationError);
}

TEST_CASE("qattack preserves edge count and budget arithmetic") {
    Graph g = load_edge_list(std::string(TEST_DATA_DIR) + "/karate.edges");
    PerturbationRecord rec;
    Graph attacked = qattack(g, 0.05, small_ga(), 7, &rec);
    attacked.validate();
    CHECK(attacked.edge_count() == 78);
    CHECK(rec.removed.size() == 4);  // round(0.05 * 78)
    CHECK(rec.added.size() == 4);
}

TEST_CASE("qattack rejects a zero budget") {
    Graph g = dyads();
    CHECK_THROWS_AS(qattack(g, 0.01, small_ga(), 1), ValidationError);
}

TEST_CASE("qattack lowers greedy modularity on karate") {
    Graph g = load_edge_list(std::string(TEST_DATA_DIR) + "/karate.edges");
    double clean_q = modularity(g, greedy_modularity_partition(g));
    int not_worse = 0;
    for (int s = 0; s < 3; ++s) {
        Graph attacked = qattack(g, 0.05, small_ga(), 100 + s);
        double q = modularity(attacked, greedy_modularity_partition(attacked));
        if (q <= clean_q) ++not_worse;
    }
    CHECK(not_worse >= 2);
}

TEST_CASE("perturb_mixed output is nonnegative and near the input at full rank") {
    Graph g = two_triangles();
    Graph mixed = perturb_mixed(g, nullptr, 6, 11);
    CHECK(!mixed.binary);
    CHECK((mixed.adjacency.array() >= 0.0).all());
    CHECK((mixed.adjacency - g.adjacency).norm() / g.adjacency.norm() < 0.2);
}

TEST_CASE("perturb_mixed applies base noise first") {
    Graph g = generate_er(20, 0.3, 9);
    auto base = std::make_shared<NoiseSpec>(NoiseSpec::random(1.0, 1));
    Graph mixed = perturb_mixed(g, base.get(), 20, 21);
    // rank-n NMF of the complement should stay close to the complement
    Graph comp = perturb_random(g, 1.0, 1);
    CHECK((mixed.adjacency - comp.adjacency).norm() < (mixed.adjacency - g.adjacency).norm());
}

TEST_CASE("perturb_mixed validates the rank") {
    Graph g = dyads();
    CHECK_THROWS_AS(perturb_mixed(g, nullptr, 9, 0), ValidationError);
}

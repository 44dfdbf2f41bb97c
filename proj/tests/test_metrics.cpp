#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "silencer/errors.hpp"
#include "silencer/graph.hpp"
#include "silencer/metrics.hpp"

using namespace silencer;

namespace {

Partition make(std::vector<int> labels, int k) { return Partition{std::move(labels), k}; }

Partition random_partition(std::mt19937_64& rng, int n, int k) {
    Partition p;
    p.k = k;
    p.labels.resize(n);
    for (int i = 0; i < n; ++i) p.labels[i] = static_cast<int>(rng() % k);
    // make sure every label occurs so k is tight
    for (int c = 0; c < k; ++c) p.labels[c % n] = c;
    return p;
}

}  // namespace

TEST_CASE("nmi basics") {
    auto x = make({0, 0, 1, 1}, 2);
    CHECK(nmi(x, x) == doctest::Approx(1.0));
    CHECK(nmi(x, make({1, 1, 0, 0}, 2)) == doctest::Approx(1.0));  // relabeling
    CHECK(nmi(x, make({0, 1, 0, 1}, 2)) == doctest::Approx(0.0));  // independent
    CHECK(nmi(make({0, 0, 0}, 1), make({0, 0, 0}, 1)) == 1.0);     // degenerate convention
    CHECK_THROWS_AS(nmi(x, make({0, 0, 1}, 2)), ValidationError);
}

TEST_CASE("ari basics and pair-counting oracle") {
    auto x = make({0, 0, 1, 1}, 2);
    CHECK(ari(x, x) == doctest::Approx(1.0));
    auto y = make({0, 0, 0, 1}, 2);
    CHECK(ari(x, y) == doctest::Approx(oracles::ari_oracle(x.labels, y.labels)).epsilon(1e-12));
}

TEST_CASE("ari is approximately zero for independent random partitions") {
    std::mt19937_64 rng(17);
    double total = 0.0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        auto x = random_partition(rng, 50, 3);
        auto y = random_partition(rng, 50, 3);
        total += ari(x, y);
    }
    CHECK(std::abs(total / trials) < 0.02);
}

TEST_CASE("pairwise f1 basics") {
    auto x = make({0, 0, 1, 1}, 2);
    CHECK(pairwise_f1(x, x) == doctest::Approx(1.0));
    // all singletons: no predicted positive pairs -> 0 by convention
    CHECK(pairwise_f1(make({0, 1, 2, 3}, 4), x) == 0.0);
    auto y = make({0, 0, 0, 1}, 2);
    CHECK(pairwise_f1(x, y) ==
          doctest::Approx(oracles::f1_oracle(x.labels, y.labels)).epsilon(1e-12));
}

TEST_CASE("metrics agree with contingency oracles on random partition pairs") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        int k1 = 2 + static_cast<int>(rng() % 7);
        int k2 = 2 + static_cast<int>(rng() % 7);
        auto x = random_partition(rng, 200, k1);
        auto y = random_partition(rng, 200, k2);
        CHECK(nmi(x, y) == doctest::Approx(oracles::nmi_oracle(x.labels, y.labels, k1, k2))
                               .epsilon(1e-12));
        CHECK(ari(x, y) == doctest::Approx(oracles::ari_oracle(x.labels, y.labels)).epsilon(1e-12));
        CHECK(pairwise_f1(x, y) ==
              doctest::Approx(oracles::f1_oracle(x.labels, y.labels)).epsilon(1e-12));
    }
}

TEST_CASE("metrics are invariant under label permutation") {
    std::mt19937_64 rng(29);
    auto x = random_partition(rng, 80, 5);
    auto y = random_partition(rng, 80, 4);
    double n0 = nmi(x, y), a0 = ari(x, y), f0 = pairwise_f1(x, y);
    for (int t = 0; t < 100; ++t) {
        std::vector<int> perm(x.k);
        for (int i = 0; i < x.k; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        Partition xp = x;
        for (auto& l : xp.labels) l = perm[l];
        CHECK(nmi(xp, y) == doctest::Approx(n0).epsilon(1e-12));
        CHECK(ari(xp, y) == doctest::Approx(a0).epsilon(1e-12));
        CHECK(pairwise_f1(xp, y) == doctest::Approx(f0).epsilon(1e-12));
    }
}

TEST_CASE("nmi and ari are symmetric") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 20; ++t) {
        auto x = random_partition(rng, 60, 4);
        auto y = random_partition(rng, 60, 3);
        CHECK(nmi(x, y) == doctest::Approx(nmi(y, x)).epsilon(1e-12));
        CHECK(ari(x, y) == doctest::Approx(ari(y, x)).epsilon(1e-12));
    }
}

TEST_CASE("modularity of two disjoint dyads split by component is 1/2") {
    Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(4, 4);
    g.adjacency(0, 1) = g.adjacency(1, 0) = 1.0;
    g.adjacency(2, 3) = g.adjacency(3, 2) = 1.0;
    CHECK(modularity(g, make({0, 0, 1, 1}, 2)) == doctest::Approx(0.5));
}

TEST_CASE("modularity of a complete graph in one community is zero") {
    Graph g;
    g.adjacency = Eigen::MatrixXd::Ones(5, 5) - Eigen::MatrixXd::Identity(5, 5);
    auto p = make({0, 0, 0, 0, 0}, 1);
    CHECK(modularity(g, p) == doctest::Approx(oracles::modularity_oracle(g.adjacency, p.labels))
                                  .epsilon(1e-12));
    CHECK(modularity(g, p) == doctest::Approx(0.0));
}

TEST_CASE("modularity matches the double-sum oracle on random graphs") {
    std::mt19937_64 rng(37);
    for (int t = 0; t < 20; ++t) {
        Graph g = generate_er(40, 0.15, 100 + t);
        if (g.edge_count() == 0) continue;
        auto p = random_partition(rng, 40, 4);
        CHECK(modularity(g, p) ==
              doctest::Approx(oracles::modularity_oracle(g.adjacency, p.labels)).epsilon(1e-12));
    }
}

TEST_CASE("modularity rejects the edgeless graph") {
    Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(3, 3);
    CHECK_THROWS_AS(modularity(g, make({0, 1, 2}, 3)), ValidationError);
}

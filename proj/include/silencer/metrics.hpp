#ifndef SILENCER_METRICS_HPP
#define SILENCER_METRICS_HPP

#include <Eigen/Dense>

#include "silencer/graph.hpp"

namespace silencer {

/// k_x by k_y joint count matrix of two partitions over the same nodes.
struct ContingencyTable {
    Eigen::MatrixXi counts;
    int n = 0;
};

ContingencyTable contingency(const Partition& x, const Partition& y);

/// NMI = 2 I(X,Y) / (H(X) + H(Y)), natural log. Two single-cluster
/// partitions score 1 by convention.
double nmi(const Partition& x, const Partition& y);

/// Adjusted Rand index; 1 for identical partitions, ~0 for independent ones,
/// may be negative.
double ari(const Partition& x, const Partition& y);

/// Pair-counting F1: TP are node pairs co-clustered in both partitions,
/// precision over pred's co-clustered pairs, recall over truth's. Zero
/// positives on either side gives 0.
double pairwise_f1(const Partition& pred, const Partition& truth);

/// Newman modularity Q with the degree-preserving null model.
double modularity(const Graph& g, const Partition& part);

}  // namespace silencer

#endif

#include "silencer/metrics.hpp"

#include <cmath>

#include "silencer/errors.hpp"

namespace silencer {

namespace {

double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

ContingencyTable contingency(const Partition& x, const Partition& y) {
    if (x.labels.size() != y.labels.size())
        throw ValidationError("contingency: partitions have different lengths");
    ContingencyTable t;
    t.n = static_cast<int>(x.labels.size());
    t.counts = Eigen::MatrixXi::Zero(x.k, y.k);
    for (int i = 0; i < t.n; ++i) t.counts(x.labels[i], y.labels[i]) += 1;
    return t;
}

double nmi(const Partition& x, const Partition& y) {
    auto t = contingency(x, y);
    const double n = t.n;
    Eigen::VectorXd a = t.counts.cast<double>().rowwise().sum();
    Eigen::VectorXd b = t.counts.cast<double>().colwise().sum();

    double hx = 0.0, hy = 0.0, mi = 0.0;
    for (int i = 0; i < a.size(); ++i)
        if (a(i) > 0) hx -= (a(i) / n) * std::log(a(i) / n);
    for (int j = 0; j < b.size(); ++j)
        if (b(j) > 0) hy -= (b(j) / n) * std::log(b(j) / n);
    for (int i = 0; i < t.counts.rows(); ++i)
        for (int j = 0; j < t.counts.cols(); ++j) {
            double nij = t.counts(i, j);
            if (nij > 0) mi += (nij / n) * std::log(n * nij / (a(i) * b(j)));
        }
    if (hx + hy == 0.0) return 1.0;  // both single-cluster
    return 2.0 * mi / (hx + hy);
}

double ari(const Partition& x, const Partition& y) {
    auto t = contingency(x, y);
    const double n = t.n;
    Eigen::VectorXd a = t.counts.cast<double>().rowwise().sum();
    Eigen::VectorXd b = t.counts.cast<double>().colwise().sum();

    double sum_ij = 0.0;
    for (int i = 0; i < t.counts.rows(); ++i)
        for (int j = 0; j < t.counts.cols(); ++j) sum_ij += choose2(t.counts(i, j));
    double sum_a = 0.0, sum_b = 0.0;
    for (int i = 0; i < a.size(); ++i) sum_a += choose2(a(i));
    for (int j = 0; j < b.size(); ++j) sum_b += choose2(b(j));

    double expected = sum_a * sum_b / choose2(n);
    double maximum = 0.5 * (sum_a + sum_b);
    if (maximum == expected) return 1.0;  // degenerate: both trivial partitions
    return (sum_ij - expected) / (maximum - expected);
}

double pairwise_f1(const Partition& pred, const Partition& truth) {
    auto t = contingency(pred, truth);
    Eigen::VectorXd a = t.counts.cast<double>().rowwise().sum();
    Eigen::VectorXd b = t.counts.cast<double>().colwise().sum();

    double tp = 0.0;
    for (int i = 0; i < t.counts.rows(); ++i)
        for (int j = 0; j < t.counts.cols(); ++j) tp += choose2(t.counts(i, j));
    double pred_pairs = 0.0, truth_pairs = 0.0;
    for (int i = 0; i < a.size(); ++i) pred_pairs += choose2(a(i));
    for (int j = 0; j < b.size(); ++j) truth_pairs += choose2(b(j));

    if (pred_pairs == 0.0 || truth_pairs == 0.0 || tp == 0.0) return 0.0;
    double precision = tp / pred_pairs;
    double recall = tp / truth_pairs;
    return 2.0 * precision * recall / (precision + recall);
}

double modularity(const Graph& g, const Partition& part) {
    const int n = g.n();
    if (static_cast<int>(part.labels.size()) != n)
        throw ValidationError("modularity: partition length mismatch");
    Eigen::VectorXd deg = g.adjacency.rowwise().sum();
    const double two_m = deg.sum();
    if (two_m <= 0.0) throw ValidationError("modularity: graph has no edges");

    // Q = sum_c [ in_c / 2m - (d_c / 2m)^2 ], in_c counting both directions.
    Eigen::VectorXd internal = Eigen::VectorXd::Zero(part.k);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(part.k);
    for (int i = 0; i < n; ++i) {
        total(part.labels[i]) += deg(i);
        for (int j = 0; j < n; ++j)
            if (part.labels[i] == part.labels[j]) internal(part.labels[i]) += g.adjacency(i, j);
    }
    double q = 0.0;
    for (int c = 0; c < part.k; ++c) {
        double frac = total(c) / two_m;
        q += internal(c) / two_m - frac * frac;
    }
    return q;
}

}  // namespace silencer

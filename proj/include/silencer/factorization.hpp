#ifndef SILENCER_FACTORIZATION_HPP
#define SILENCER_FACTORIZATION_HPP

#include <Eigen/Dense>
#include <vector>

#include "silencer/graph.hpp"
#include "silencer/selfpace.hpp"

namespace silencer {

struct FactorPair {
    Eigen::MatrixXd U;  // n x k
    Eigen::MatrixXd V;  // k x n
};

/// Layered factorization A ~ U_1 U_2 ... U_p V_p. The prefix/suffix products
/// Psi and Phi are derived, never stored.
struct FactorStack {
    std::vector<Eigen::MatrixXd> layers;  // U_i, shape r_{i-1} x r_i
    Eigen::MatrixXd Vp;                   // r_p x n

    int depth() const { return static_cast<int>(layers.size()); }
    /// U_1 ... U_p (n x k).
    Eigen::MatrixXd mapping() const;
};

struct SolverOptions {
    double lambda = 0.01;       // graph-regularization weight
    int max_inner_iters = 100;
    int max_pretrain_iters = 100;
    double tol = 1e-4;          // relative loss-change threshold
    double epsilon = 1e-10;     // denominator guard
    std::uint64_t seed = 0;
};

struct FitReport {
    std::vector<double> loss_trace;   // per inner iteration
    std::vector<double> outer_trace;  // per outer round (silencer variants)
    bool converged = false;
    int iterations_used = 0;
};

/// Plain NMF, min ||A - UV||_F^2 (+ lambda tr(V L V^T)). Implemented as the
/// silencer updates with W frozen at all-ones, so the two paths coincide
/// step for step.
std::pair<FactorPair, FitReport> nmf_fit(const Graph& a, int k, const SolverOptions& opts);

/// Self-paced pixel-weighted NMF. Each outer round recomputes the pixel
/// losses (A - UV)^2, refreshes W through the soft-weight operator, runs the
/// weighted multiplicative updates to tolerance, then advances gamma.
std::tuple<FactorPair, Eigen::MatrixXd, FitReport> silencer_nmf_fit(
    const Graph& a, int k, const PaceSchedule& sched, const SolverOptions& opts);

/// Layer-wise pre-training: A ~ U_1 V_1, V_1 ~ U_2 V_2, ..., each shallow
/// solve minimizing ||X - UV||^2 + ||V - U^T X||^2.
FactorStack pretrain(const Graph& a, const LayerConfig& layers, const SolverOptions& opts);

/// Self-paced deep NMF. W (k x n) weights the encoder pixel losses
/// (V_p - U_p^T ... U_1^T A)^2; U_i and V_p follow the weighted
/// multiplicative rules after pre-training.
std::tuple<FactorStack, Eigen::MatrixXd, FitReport> silencer_danmf_fit(
    const Graph& a, const LayerConfig& layers, const PaceSchedule& sched,
    const SolverOptions& opts);

/// Deep autoencoder-like NMF: the silencer loop with W frozen at all-ones
/// and a single outer round.
std::pair<FactorStack, FitReport> danmf_fit(const Graph& a, const LayerConfig& layers,
                                            const SolverOptions& opts);

/// Encoder-free ablation: the same loop with every encoder term removed.
std::pair<FactorStack, FitReport> dnmf_fit(const Graph& a, const LayerConfig& layers,
                                           const SolverOptions& opts);

/// Node d joins the community with the largest [V]_{bd}; ties go to the
/// lowest community index.
Partition assign_communities(const Eigen::MatrixXd& v);
Partition assign_communities(const FactorPair& pair);
Partition assign_communities(const FactorStack& stack);

/// (1/n)||A - Psi_p V_p||_F and (1/n)||V_p - Psi_p^T A||_F.
std::pair<double, double> reconstruction_errors(const Graph& a, const FactorStack& stack);

namespace detail {

// Shared deep fine-tuning loop; freeze_weights pins W = 1 (one outer round
// when combined with m = 1), drop_encoder removes the encoder terms.
std::tuple<FactorStack, Eigen::MatrixXd, FitReport> deep_fit(
    const Graph& a, const LayerConfig& layers, const PaceSchedule& sched,
    const SolverOptions& opts, bool freeze_weights, bool drop_encoder);

// Shallow weighted loop shared by nmf_fit / silencer_nmf_fit. An explicit
// init replaces the seeded random start (stationarity checks).
std::tuple<FactorPair, Eigen::MatrixXd, FitReport> shallow_fit(
    const Graph& a, int k, const PaceSchedule& sched, const SolverOptions& opts,
    bool freeze_weights, const FactorPair* init = nullptr);

}  // namespace detail

}  // namespace silencer

#endif

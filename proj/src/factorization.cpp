#include "silencer/factorization.hpp"

#include <cmath>
#include <limits>

#include "silencer/errors.hpp"
#include "silencer/random.hpp"

namespace silencer {

namespace {

Eigen::MatrixXd random_factor(int rows, int cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = uniform01(rng);
    return m;
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite())
        throw NumericalError(std::string("non-finite entries in ") + what);
}

bool relative_change_below(double prev, double cur, double tol) {
    return std::abs(cur - prev) / std::max(prev, 1e-12) < tol;
}

}  // namespace

Eigen::MatrixXd FactorStack::mapping() const {
    Eigen::MatrixXd psi = layers.front();
    for (size_t i = 1; i < layers.size(); ++i) psi *= layers[i];
    return psi;
}

namespace detail {

std::tuple<FactorPair, Eigen::MatrixXd, FitReport> shallow_fit(
    const Graph& a, int k, const PaceSchedule& sched, const SolverOptions& opts,
    bool freeze_weights, const FactorPair* init) {
    const int n = a.n();
    if (k > n) throw ValidationError("nmf: k must not exceed n");
    if (k < 1) throw ValidationError("nmf: k must be positive");
    sched.validate();

    const Eigen::MatrixXd& A = a.adjacency;
    auto dl = laplacian(a);
    const double lambda = opts.lambda;
    const double eps = opts.epsilon;

    Rng rng(opts.seed);
    Eigen::MatrixXd U = init ? init->U : random_factor(n, k, rng);
    Eigen::MatrixXd V = init ? init->V : random_factor(k, n, rng);
    if (init && (U.rows() != n || U.cols() != k || V.rows() != k || V.cols() != n))
        throw ValidationError("nmf: init factor shapes do not match (n, k)");
    Eigen::MatrixXd W = Eigen::MatrixXd::Ones(n, n);

    FitReport report;
    const int outer_rounds = freeze_weights ? 1 : sched.outer_iters;
    double gamma_start = 0.0;
    double gamma = 0.0;

    for (int t = 0; t < outer_rounds; ++t) {
        if (!freeze_weights) {
            Eigen::MatrixXd losses = (A - U * V).array().square();
            if (t == 0) {
                gamma_start = sched.gamma0 ? *sched.gamma0 : gamma_from_losses(losses);
            }
            gamma = sched.advance(gamma_start, t);
            W = update_weights(losses, gamma);
        }
        const double reg_w = freeze_weights ? 0.0 : regularizer_value(W, gamma);

        double prev = std::numeric_limits<double>::infinity();
        bool inner_converged = false;
        for (int it = 0; it < opts.max_inner_iters; ++it) {
            Eigen::MatrixXd R = U * V;
            U.array() *= ((W.array() * A.array()).matrix() * V.transpose()).array() /
                         (((W.array() * R.array()).matrix() * V.transpose()).array() + eps);
            R.noalias() = U * V;
            Eigen::MatrixXd num = U.transpose() * (W.array() * A.array()).matrix() + lambda * V * A;
            Eigen::MatrixXd den = U.transpose() * (W.array() * R.array()).matrix() +
                                  lambda * V * dl.degrees.asDiagonal();
            V.array() *= num.array() / (den.array() + eps);
            check_finite(U, "U");
            check_finite(V, "V");

            R.noalias() = U * V;
            double loss = (W.array() * (A - R).array().square()).sum() + reg_w +
                          lambda * (V * dl.laplacian).cwiseProduct(V).sum();
            report.loss_trace.push_back(loss);
            ++report.iterations_used;
            if (relative_change_below(prev, loss, opts.tol)) {
                inner_converged = true;
                break;
            }
            prev = loss;
        }
        report.outer_trace.push_back(report.loss_trace.back());
        report.converged = inner_converged;
    }
    return {FactorPair{std::move(U), std::move(V)}, std::move(W), std::move(report)};
}

std::tuple<FactorStack, Eigen::MatrixXd, FitReport> deep_fit(
    const Graph& a, const LayerConfig& layers, const PaceSchedule& sched,
    const SolverOptions& opts, bool freeze_weights, bool drop_encoder) {
    const int n = a.n();
    layers.validate(n);
    sched.validate();
    const int p = layers.depth();
    const int k = layers.rank();

    const Eigen::MatrixXd& A = a.adjacency;
    auto dl = laplacian(a);
    const double lambda = opts.lambda;
    const double eps = opts.epsilon;

    FactorStack stack = pretrain(a, layers, opts);
    Eigen::MatrixXd W = Eigen::MatrixXd::Ones(k, n);

    FitReport report;
    const int outer_rounds = freeze_weights ? 1 : sched.outer_iters;
    double gamma_start = 0.0;
    double gamma = 0.0;

    // T_i = Psi_{i-1}^T A, built incrementally over the layer sweep.
    std::vector<Eigen::MatrixXd> psi_T_A(p + 2);

    for (int t = 0; t < outer_rounds; ++t) {
        if (!freeze_weights && !drop_encoder) {
            Eigen::MatrixXd encode = stack.mapping().transpose() * A;
            Eigen::MatrixXd losses = (stack.Vp - encode).array().square();
            if (t == 0) {
                gamma_start = sched.gamma0 ? *sched.gamma0 : gamma_from_losses(losses);
            }
            gamma = sched.advance(gamma_start, t);
            W = update_weights(losses, gamma);
        }
        const double reg_w =
            (freeze_weights || drop_encoder) ? 0.0 : regularizer_value(W, gamma);

        double prev = std::numeric_limits<double>::infinity();
        bool inner_converged = false;
        for (int it = 0; it < opts.max_inner_iters; ++it) {
            // V-side coupling A Vp^T (+ A (W o Vp)^T), fixed during the layer
            // sweep; applied through the cached Psi^T A products.
            Eigen::MatrixXd v_sum = stack.Vp;  // k x n
            if (!drop_encoder) v_sum.array() += W.array() * stack.Vp.array();

            // Suffix products Phi_{i+1} = U_{i+1} ... U_p (r_i x k).
            std::vector<Eigen::MatrixXd> phi(p + 2);
            phi[p + 1] = Eigen::MatrixXd::Identity(k, k);
            for (int i = p; i >= 1; --i) phi[i] = stack.layers[i - 1] * phi[i + 1];

            psi_T_A[1] = A;  // Psi_0 = I
            Eigen::MatrixXd psi;  // Psi_{i-1}, n x r_{i-1}

            for (int i = 1; i <= p; ++i) {
                Eigen::MatrixXd& Ui = stack.layers[i - 1];
                const Eigen::MatrixXd& Ti = psi_T_A[i];  // r_{i-1} x n

                // numerator: Psi^T [A Vp^T + A (W o Vp)^T] Phi^T = Ti v_sum^T Phi^T
                Eigen::MatrixXd numerator = (Ti * v_sum.transpose()) * phi[i + 1].transpose();

                // decoder denominator: Psi^T Psi U_i (Phi Vp Vp^T Phi^T)
                Eigen::MatrixXd phiVp = phi[i + 1] * stack.Vp;  // r_i x n
                Eigen::MatrixXd core = phiVp * stack.Vp.transpose() * phi[i + 1].transpose();
                Eigen::MatrixXd denominator;
                if (i == 1)
                    denominator.noalias() = Ui * core;
                else
                    denominator.noalias() = (psi.transpose() * psi) * Ui * core;

                if (!drop_encoder) {
                    // encoder denominator: Psi^T A (W o E)^T Phi^T with
                    // E = Phi^T U_i^T Psi^T A the current encoder output.
                    Eigen::MatrixXd E = phi[i + 1].transpose() * (Ui.transpose() * Ti);
                    Eigen::MatrixXd WE = (W.array() * E.array()).matrix();
                    denominator.noalias() += Ti * WE.transpose() * phi[i + 1].transpose();
                }

                Ui.array() *= numerator.array() / (denominator.array() + eps);
                check_finite(Ui, "U_i");

                // Advance prefix products with the freshly updated U_i.
                if (i == 1)
                    psi = Ui;
                else
                    psi = psi * Ui;
                psi_T_A[i + 1] = Ui.transpose() * Ti;
            }

            // V_p update. psi is now Psi_p, psi_T_A[p+1] = Psi_p^T A.
            const Eigen::MatrixXd& encode = psi_T_A[p + 1];  // k x n
            Eigen::MatrixXd num_v = encode + lambda * stack.Vp * A;
            Eigen::MatrixXd den_v = (psi.transpose() * psi) * stack.Vp +
                                    lambda * stack.Vp * dl.degrees.asDiagonal();
            if (!drop_encoder) {
                num_v.noalias() += (W.array() * encode.array()).matrix();
                den_v.noalias() += (W.array() * stack.Vp.array()).matrix();
            }
            stack.Vp.array() *= num_v.array() / (den_v.array() + eps);
            check_finite(stack.Vp, "V_p");

            // Objective: ||A - Psi_p Vp||^2 (+ weighted encoder + reg terms).
            double loss = (A - psi * stack.Vp).squaredNorm() +
                          lambda * (stack.Vp * dl.laplacian).cwiseProduct(stack.Vp).sum();
            if (!drop_encoder)
                loss += (W.array() * (stack.Vp - encode).array().square()).sum() + reg_w;
            if (!std::isfinite(loss)) throw NumericalError("deep fit: objective diverged");
            report.loss_trace.push_back(loss);
            ++report.iterations_used;
            if (relative_change_below(prev, loss, opts.tol)) {
                inner_converged = true;
                break;
            }
            prev = loss;
        }
        report.outer_trace.push_back(report.loss_trace.back());
        report.converged = inner_converged;
    }
    return {std::move(stack), std::move(W), std::move(report)};
}

}  // namespace detail

std::pair<FactorPair, FitReport> nmf_fit(const Graph& a, int k, const SolverOptions& opts) {
    PaceSchedule frozen;
    frozen.outer_iters = 1;
    auto [pair, w, report] = detail::shallow_fit(a, k, frozen, opts, /*freeze_weights=*/true);
    return {std::move(pair), std::move(report)};
}

std::tuple<FactorPair, Eigen::MatrixXd, FitReport> silencer_nmf_fit(
    const Graph& a, int k, const PaceSchedule& sched, const SolverOptions& opts) {
    return detail::shallow_fit(a, k, sched, opts, /*freeze_weights=*/false);
}

FactorStack pretrain(const Graph& a, const LayerConfig& layers, const SolverOptions& opts) {
    const int n = a.n();
    layers.validate(n);
    const int p = layers.depth();
    const double eps = opts.epsilon;

    Rng rng(mix_seed(opts.seed ^ 0x70726574ull));  // separate stream from fine-tuning
    FactorStack stack;
    Eigen::MatrixXd X = a.adjacency;

    for (int i = 1; i <= p; ++i) {
        const int rows = layers.sizes[i - 1];
        const int r = layers.sizes[i];
        Eigen::MatrixXd U = random_factor(rows, r, rng);
        Eigen::MatrixXd V = random_factor(r, n, rng);

        // min ||X - UV||^2 + ||V - U^T X||^2 by multiplicative updates.
        Eigen::MatrixXd XXt = X * X.transpose();
        double prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < opts.max_pretrain_iters; ++it) {
            Eigen::MatrixXd XVt = X * V.transpose();
            U.array() *= (2.0 * XVt).array() /
                         ((U * (V * V.transpose()) + XXt * U).array() + eps);
            Eigen::MatrixXd UtX = U.transpose() * X;
            Eigen::MatrixXd UtU = U.transpose() * U;
            V.array() *= (2.0 * UtX).array() / ((UtU * V + V).array() + eps);
            check_finite(U, "pretrain U");
            check_finite(V, "pretrain V");

            // ||X - UV||^2 expanded to avoid forming UV at full size.
            UtX.noalias() = U.transpose() * X;
            UtU.noalias() = U.transpose() * U;
            double decoder = X.squaredNorm() - 2.0 * UtX.cwiseProduct(V).sum() +
                             (UtU * V).cwiseProduct(V).sum();
            double encoder = (V - UtX).squaredNorm();
            double loss = decoder + encoder;
            if (relative_change_below(prev, loss, opts.tol)) break;
            prev = loss;
        }
        stack.layers.push_back(std::move(U));
        if (i == p)
            stack.Vp = std::move(V);
        else
            X = std::move(V);
    }
    return stack;
}

std::tuple<FactorStack, Eigen::MatrixXd, FitReport> silencer_danmf_fit(
    const Graph& a, const LayerConfig& layers, const PaceSchedule& sched,
    const SolverOptions& opts) {
    return detail::deep_fit(a, layers, sched, opts, /*freeze_weights=*/false,
                            /*drop_encoder=*/false);
}

std::pair<FactorStack, FitReport> danmf_fit(const Graph& a, const LayerConfig& layers,
                                            const SolverOptions& opts) {
    PaceSchedule frozen;
    frozen.outer_iters = 1;
    auto [stack, w, report] =
        detail::deep_fit(a, layers, frozen, opts, /*freeze_weights=*/true,
                         /*drop_encoder=*/false);
    return {std::move(stack), std::move(report)};
}

std::pair<FactorStack, FitReport> dnmf_fit(const Graph& a, const LayerConfig& layers,
                                           const SolverOptions& opts) {
    PaceSchedule frozen;
    frozen.outer_iters = 1;
    auto [stack, w, report] =
        detail::deep_fit(a, layers, frozen, opts, /*freeze_weights=*/true,
                         /*drop_encoder=*/true);
    return {std::move(stack), std::move(report)};
}

Partition assign_communities(const Eigen::MatrixXd& v) {
    Partition part;
    part.k = static_cast<int>(v.rows());
    part.labels.resize(v.cols());
    for (Eigen::Index d = 0; d < v.cols(); ++d) {
        int best = 0;
        for (Eigen::Index b = 1; b < v.rows(); ++b)
            if (v(b, d) > v(best, d)) best = static_cast<int>(b);
        part.labels[d] = best;
    }
    return part;
}

Partition assign_communities(const FactorPair& pair) { return assign_communities(pair.V); }

Partition assign_communities(const FactorStack& stack) { return assign_communities(stack.Vp); }

std::pair<double, double> reconstruction_errors(const Graph& a, const FactorStack& stack) {
    const double n = a.n();
    Eigen::MatrixXd psi = stack.mapping();
    double decoder = (a.adjacency - psi * stack.Vp).norm() / n;
    double encoder = (stack.Vp - psi.transpose() * a.adjacency).norm() / n;
    return {decoder, encoder};
}

}  // namespace silencer

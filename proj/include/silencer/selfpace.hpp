#ifndef SILENCER_SELFPACE_HPP
#define SILENCER_SELFPACE_HPP

#include <Eigen/Dense>
#include <optional>

namespace silencer {

/// Age-parameter schedule for the self-paced outer loop: gamma_t = gamma0 * eta^t.
/// When gamma0 is unset it is taken as sqrt(median of the initial pixel
/// losses), so roughly half the pixels start with nonzero weight.
struct PaceSchedule {
    std::optional<double> gamma0;
    double eta = 2.0;          // step multiplier, tuned in (1, 2.05]
    int outer_iters = 20;      // m

    double advance(double gamma_start, int t) const;
    void validate() const;
};

/// Closed-form minimizer of w*l + 1/(w + 1/gamma) over w in [0,1]:
///   1                     if l <= (gamma/(gamma+1))^2
///   0                     if l >= gamma^2
///   1/sqrt(l) - 1/gamma   otherwise
/// Continuous in l across both thresholds.
double soft_weight(double pixel_loss, double gamma);

/// Regularizer value f(W, gamma) = sum 1/(W_bd + 1/gamma).
double regularizer_value(const Eigen::MatrixXd& weights, double gamma);

/// Elementwise soft_weight over a matrix of pixel losses.
Eigen::MatrixXd update_weights(const Eigen::MatrixXd& losses, double gamma);

/// Quantile rule for the initial age parameter: sqrt(median loss), clamped
/// below by 1e-6.
double gamma_from_losses(const Eigen::MatrixXd& losses);

}  // namespace silencer

#endif

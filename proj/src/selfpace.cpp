#include "silencer/selfpace.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "silencer/errors.hpp"

namespace silencer {

void PaceSchedule::validate() const {
    if (gamma0 && *gamma0 <= 0.0) throw ValidationError("pace schedule: gamma0 must be positive");
    if (eta <= 1.0 || eta > 2.05) throw ValidationError("pace schedule: eta must lie in (1, 2.05]");
    if (outer_iters < 1) throw ValidationError("pace schedule: outer_iters must be >= 1");
}

double PaceSchedule::advance(double gamma_start, int t) const {
    return gamma_start * std::pow(eta, t);
}

double soft_weight(double pixel_loss, double gamma) {
    const double low = gamma / (gamma + 1.0);
    if (pixel_loss <= low * low) return 1.0;
    if (pixel_loss >= gamma * gamma) return 0.0;
    return 1.0 / std::sqrt(pixel_loss) - 1.0 / gamma;
}

double regularizer_value(const Eigen::MatrixXd& weights, double gamma) {
    return (weights.array() + 1.0 / gamma).inverse().sum();
}

Eigen::MatrixXd update_weights(const Eigen::MatrixXd& losses, double gamma) {
    if ((losses.array() < 0.0).any())
        throw ValidationError("update_weights: pixel losses must be nonnegative");
    return losses.unaryExpr([gamma](double l) { return soft_weight(l, gamma); });
}

double gamma_from_losses(const Eigen::MatrixXd& losses) {
    std::vector<double> flat(losses.data(), losses.data() + losses.size());
    auto mid = flat.begin() + flat.size() / 2;
    std::nth_element(flat.begin(), mid, flat.end());
    return std::max(std::sqrt(*mid), 1e-6);
}

}  // namespace silencer

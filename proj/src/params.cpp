#include "opo/params.hpp"

#include <cmath>

namespace opo {

void OpoParams::validate() const {
    if (!(k_a > 0.0) || !std::isfinite(k_a)) throw std::invalid_argument("k_a must be positive");
    if (!(k_p > 0.0) || !std::isfinite(k_p)) throw std::invalid_argument("k_p must be positive");
    if (!(chi > 0.0) || !std::isfinite(chi)) throw std::invalid_argument("chi must be positive");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (!(sigma >= 1.0) || !std::isfinite(sigma))
        throw std::invalid_argument("sigma must be >= 1 (below-threshold operation is out of scope)");
    if (!amplitude_profile.empty()) {
        if (static_cast<int>(amplitude_profile.size()) != n)
            throw std::invalid_argument("amplitude_profile length must equal n");
        bool any_positive = false;
        for (double w : amplitude_profile) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("amplitude_profile entries must be nonnegative");
            if (w > 0.0) any_positive = true;
        }
        if (!any_positive)
            throw std::invalid_argument("amplitude_profile needs at least one positive entry");
    }
}

std::vector<double> OpoParams::profile_or_equal() const {
    if (!amplitude_profile.empty()) return amplitude_profile;
    return std::vector<double>(static_cast<size_t>(n), 1.0);
}

double SteadyState::alpha_sq_sum() const {
    double s = 0.0;
    for (double a : alpha) s += a * a;
    return s;
}

double threshold_pump(const OpoParams& p) {
    p.validate();
    return (p.k_a / (2.0 * p.chi)) * std::sqrt(p.k_p / 2.0);
}

SteadyState steady_state(const OpoParams& p) {
    p.validate();
    const std::vector<double> w = p.profile_or_equal();

    double wsq = 0.0;
    for (double wi : w) wsq += wi * wi;

    // total alpha^2 fixed by the threshold relation
    const double total = p.k_a * p.k_p * (std::sqrt(p.sigma) - 1.0) / (4.0 * p.chi * p.chi);
    const double scale = std::sqrt(total / wsq);

    SteadyState ss;
    ss.alpha.resize(w.size());
    for (size_t i = 0; i < w.size(); ++i) ss.alpha[i] = scale * w[i];
    ss.pump_mean = p.k_a / (2.0 * p.chi);
    ss.pump_in = threshold_pump(p) * std::sqrt(p.sigma);
    ss.phases.assign(w.size(), 0.0);
    return ss;
}

}  // namespace opo

#include "opo/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opo {

Jacobian build_jacobian(const SteadyState& ss, const OpoParams& p) {
    p.validate();
    if (static_cast<int>(ss.alpha.size()) != p.n)
        throw std::invalid_argument("steady state dimension does not match params");

    const int n = p.n;
    const int d = 2 * (2 * n + 1);
    Jacobian J;
    J.n = n;
    J.m = Eigen::MatrixXd::Zero(d, d);

    const double ka = p.k_a;
    const int pw = 4 * n;      // dw row/col
    const int pwc = 4 * n + 1; // dw* row/col

    for (int i = 0; i < n; ++i) {
        const int b = 4 * i;  // da_i, da_i*, da_{-i}, da_{-i}*
        const double c = 2.0 * p.chi * ss.alpha[static_cast<size_t>(i)];

        // signal block: damping plus the pump-mean-mediated conjugate coupling,
        // which equals k_a exactly because |varpi^0| is clamped at k_a/(2 chi)
        J.m(b + 0, b + 0) = -ka;
        J.m(b + 0, b + 3) = ka;
        J.m(b + 1, b + 1) = -ka;
        J.m(b + 1, b + 2) = ka;
        J.m(b + 2, b + 2) = -ka;
        J.m(b + 2, b + 1) = ka;
        J.m(b + 3, b + 3) = -ka;
        J.m(b + 3, b + 0) = ka;

        // coupling to the fluctuating pump
        J.m(b + 0, pw) = c;
        J.m(b + 1, pwc) = c;
        J.m(b + 2, pw) = c;
        J.m(b + 3, pwc) = c;

        // back-action on the pump
        J.m(pw, b + 0) = -c;
        J.m(pw, b + 2) = -c;
        J.m(pwc, b + 1) = -c;
        J.m(pwc, b + 3) = -c;
    }
    J.m(pw, pw) = -p.k_p;
    J.m(pwc, pwc) = -p.k_p;
    return J;
}

std::vector<std::complex<double>> eigenvalues_closed_form(const OpoParams& p) {
    p.validate();
    const double ka = p.k_a;
    const double kap = p.kappa();
    const double s = std::sqrt(p.sigma);

    std::vector<std::complex<double>> ev;
    ev.reserve(static_cast<size_t>(2 * (2 * p.n + 1)));
    for (int i = 0; i < 2 * p.n - 1; ++i) ev.emplace_back(0.0, 0.0);
    for (int i = 0; i < 2 * p.n - 1; ++i) ev.emplace_back(-2.0 * ka, 0.0);

    const std::complex<double> r12 = std::sqrt(std::complex<double>(kap * (kap - 8.0 * (s - 1.0)), 0.0));
    ev.push_back(-0.5 * ka * (kap + r12));
    ev.push_back(-0.5 * ka * (kap - r12));

    const std::complex<double> r34 =
        std::sqrt(std::complex<double>((kap + 2.0) * (kap + 2.0) - 8.0 * kap * s, 0.0));
    ev.push_back(-0.5 * ka * (kap + 2.0 + r34));
    ev.push_back(-0.5 * ka * (kap + 2.0 - r34));
    return ev;
}

std::vector<std::complex<double>> eigenvalues_numeric(const Jacobian& J) {
    if (J.m.rows() != J.m.cols()) throw std::invalid_argument("Jacobian must be square");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(J.m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigenvalue iteration did not converge");
    const auto& v = solver.eigenvalues();
    return std::vector<std::complex<double>>(v.data(), v.data() + v.size());
}

double multiset_distance(std::vector<std::complex<double>> a,
                         std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    while (!a.empty()) {
        size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j) {
                const double d = std::abs(a[i] - b[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        worst = std::max(worst, best);
        a.erase(a.begin() + static_cast<long>(bi));
        b.erase(b.begin() + static_cast<long>(bj));
    }
    return worst;
}

StabilityReport is_stable(const OpoParams& p) {
    const SteadyState ss = steady_state(p);
    const Jacobian J = build_jacobian(ss, p);

    StabilityReport rep;
    rep.eigenvalues = eigenvalues_numeric(J);
    rep.closed_form_eigenvalues = eigenvalues_closed_form(p);
    rep.max_real_part = -std::numeric_limits<double>::infinity();
    for (const auto& l : rep.eigenvalues) rep.max_real_part = std::max(rep.max_real_part, l.real());
    rep.stable = rep.max_real_part <= 1e-10 * p.k_a;
    rep.match_error = multiset_distance(rep.eigenvalues, rep.closed_form_eigenvalues);
    return rep;
}

}  // namespace opo

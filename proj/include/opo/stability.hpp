#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "opo/params.hpp"

namespace opo {

// Linearization of the classical mean-value equations around the steady
// state. Variable order: (da_1, da_1*, da_{-1}, da_{-1}*, ..., dw, dw*),
// i.e. four rows per pair followed by the two pump rows. With real alpha
// and the default gauge every entry is real.
struct Jacobian {
    Eigen::MatrixXd m;
    int n = 0;

    int dim() const { return 2 * (2 * n + 1); }
};

struct StabilityReport {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<std::complex<double>> closed_form_eigenvalues;
    double max_real_part = 0.0;
    bool stable = false;
    // greedy assignment distance between the numeric and closed-form multisets
    double match_error = 0.0;
};

Jacobian build_jacobian(const SteadyState& ss, const OpoParams& p);

// The full eigenvalue multiset in closed form:
//   {0 x(2n-1), -2 k_a x(2n-1), lambda_1..4}
// lambda_{1,2} solve  l^2 + k_p l + 2 k_a k_p (sqrt(sigma)-1) = 0,
// lambda_{3,4} solve  (l + 2 k_a)(l + k_p) + 2 k_a k_p (sqrt(sigma)-1) = 0.
// Only the total sum alpha_i^2 enters, so the set holds for any profile.
std::vector<std::complex<double>> eigenvalues_closed_form(const OpoParams& p);

std::vector<std::complex<double>> eigenvalues_numeric(const Jacobian& J);

StabilityReport is_stable(const OpoParams& p);

// Greedy globally-closest-pair matching between two equal-size multisets;
// returns the largest matched-pair distance. Robust against the ordering
// ambiguity of degenerate eigenvalues.
double multiset_distance(std::vector<std::complex<double>> a,
                         std::vector<std::complex<double>> b);

}  // namespace opo

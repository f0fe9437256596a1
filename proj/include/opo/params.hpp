#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace opo {

// Numerical failure (non-convergence, singular system, divergent trajectory).
// Kept distinct from std::invalid_argument so the CLI can map the two to
// different exit codes.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Physical configuration of the above-threshold OPO. The dimensionless core
// is (kappa, sigma, n); k_a and chi only set units and default to 1.
struct OpoParams {
    double k_a = 1.0;    // signal loss rate, common to every pair
    double k_p = 1.0;    // pump loss rate
    double chi = 1.0;    // nonlinear coupling
    int n = 1;           // number of signal/idler pairs in the comb
    double sigma = 1.0;  // pump power over threshold power

    // Relative weights of |alpha_i|; empty means all equal.
    std::vector<double> amplitude_profile;

    // Cosmetic comb layout, mode frequencies omega_p/2 +- (i+1/2)*delta.
    // No computation depends on these.
    double omega_p = 0.0;
    double delta = 0.0;

    double kappa() const { return k_p / k_a; }

    // Throws std::invalid_argument on any violated constraint.
    void validate() const;

    // The profile actually used: explicit one if given, else all-ones.
    std::vector<double> profile_or_equal() const;
};

// Classical operating point. In the chosen gauge all phases are zero and the
// alpha_i are real nonnegative.
struct SteadyState {
    std::vector<double> alpha;   // |alpha_i^0|
    double pump_mean = 0.0;      // |varpi^0| = k_a/(2 chi), clamped above threshold
    double pump_in = 0.0;        // drive amplitude implied by sigma
    std::vector<double> phases;  // phi_i^0, all zero by default

    double alpha_sq_sum() const;
};

// Drive amplitude at which oscillation starts: (k_a/2chi) sqrt(k_p/2).
double threshold_pump(const OpoParams& p);

// Steady state for sigma >= 1. The profile fixes the ratios of the alpha_i;
// the overall scale is set by 4 chi^2 sum alpha_i^2 = k_a k_p (sqrt(sigma)-1).
SteadyState steady_state(const OpoParams& p);

}  // namespace opo

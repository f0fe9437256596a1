#pragma once

#include "opo/spectra.hpp"

namespace opo {

// Time-domain integration settings. Zero values mean "derive a sane default
// from the dynamics": dt from the fastest rate, burn_in from the slowest
// decaying eigenvalue, the averaging window from lowpass_bandwidth (its
// reciprocal) or from t_total.
struct SimConfig {
    double dt = 0.0;
    double t_total = 0.0;
    int n_traj = 10000;
    unsigned long long seed = 1;
    double burn_in = 0.0;
    double lowpass_bandwidth = 0.0;
    int threads = 0;
};

struct McResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    bool under_sampled = false;  // stderr above 10% of the estimate
    double dt = 0.0;             // settings actually used
    double burn_in = 0.0;
    double window = 0.0;
};

// Euler-Maruyama integration of the linearized quadrature Langevin equations,
// with outputs built from the same noise increments through
// out = sqrt(2k) x - in. The DC variance of the witness combination is
// estimated per trajectory from Hann-tapered window averages, with a
// half-window Richardson step removing the leading finite-window bias.
// Deterministic for a fixed seed, independent of the thread count.
McResult simulate_dc_variance(const Witness& w, const OpoParams& p, const SteadyState& ss,
                              const SimConfig& cfg);

}  // namespace opo

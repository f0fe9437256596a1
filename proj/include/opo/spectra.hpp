#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "opo/params.hpp"

namespace opo {

// Channel basis shared by every module: for each pair i (1-based) the
// sum/difference quadratures Q_{i+}, Q_{i-}, P_{i+}, P_{i-}, then the pump
// pair Q_p, P_p. 4n+2 channels in total. The +/- combinations carry input
// noise power 2, the single-mode pump channels carry 1.
enum class Chan { Qplus, Qminus, Pplus, Pminus, Qpump, Ppump };

int channel_count(int n);
int channel_index(Chan c, int pair, int n);  // pair is 1-based, ignored for pump
std::string channel_name(int idx, int n);    // Q+1, Q-1, P+1, P-1, ..., Qp, Pp
double channel_noise_power(int idx, int n);
bool channel_is_pminus(int idx, int n);

// Linear response at sideband frequency omega: out = T * in over the channel
// basis. Q and P sectors decouple, and each minus channel couples only to
// itself. Rows that do not exist at this omega (the minus-P rows at DC, or a
// singular sector) are flagged invalid and left zero.
struct TransferMatrix {
    double omega = 0.0;
    Eigen::MatrixXcd t;
    std::vector<char> row_valid;
};

// Real-weighted linear combination of output channels.
struct Witness {
    std::vector<double> w;
    std::string label;
};

Witness make_witness(int n, const std::string& label = "");

// Closed-form output solutions; omega must be strictly positive.
TransferMatrix transfer_closed_form(const OpoParams& p, const SteadyState& ss, double omega);

// Independent oracle: solves (i omega I - A) x = B in sector by sector and
// applies out = sqrt(2k) x - in. Accepts omega = 0 wherever the sector system
// is nonsingular; other rows come back flagged invalid.
TransferMatrix transfer_numeric(const OpoParams& p, const SteadyState& ss, double omega);

// V = sum_in N_in |sum_out w_out T[out,in]|^2. The weighted coefficients are
// summed per input channel before the modulus, so divergent pieces cancel
// exactly where the algebra cancels them.
double witness_variance(const Witness& w, const TransferMatrix& T);

// Vacuum variance of the same combination, sum_c w_c^2 N_c; the reference
// used by shot-noise normalization.
double witness_shot_reference(const Witness& w, int n);

// Lazily built ladder of transfer matrices at omega_m = k_a 2^{-m}, shared
// between repeated DC evaluations at the same operating point.
class TransferCache {
public:
    TransferCache(const OpoParams& p, const SteadyState& ss);
    const TransferMatrix& at_level(int m);
    const OpoParams& params() const { return params_; }

private:
    OpoParams params_;
    SteadyState ss_;
    std::map<int, TransferMatrix> levels_;
};

// DC limit by Richardson extrapolation in omega^2 over the dyadic ladder.
// Returns +infinity when the variance grows as omega^-2 (a clean divergence);
// throws NumericalError on a non-convergent, non-divergent ladder. Weights on
// any P_{i-} channel are rejected: that row has no DC limit.
double witness_variance_dc(const Witness& w, TransferCache& cache);
double witness_variance_dc(const Witness& w, const OpoParams& p, const SteadyState& ss);

}  // namespace opo

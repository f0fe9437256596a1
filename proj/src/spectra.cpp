#include "opo/spectra.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace opo {

namespace {
constexpr std::complex<double> I{0.0, 1.0};
}

int channel_count(int n) { return 4 * n + 2; }

int channel_index(Chan c, int pair, int n) {
    switch (c) {
        case Chan::Qpump: return 4 * n;
        case Chan::Ppump: return 4 * n + 1;
        default: break;
    }
    if (pair < 1 || pair > n) throw std::invalid_argument("pair index out of range");
    const int base = 4 * (pair - 1);
    switch (c) {
        case Chan::Qplus: return base + 0;
        case Chan::Qminus: return base + 1;
        case Chan::Pplus: return base + 2;
        default: return base + 3;  // Pminus
    }
}

std::string channel_name(int idx, int n) {
    if (idx == 4 * n) return "Qp";
    if (idx == 4 * n + 1) return "Pp";
    const int pair = idx / 4 + 1;
    static const char* kind[4] = {"Q+", "Q-", "P+", "P-"};
    return std::string(kind[idx % 4]) + std::to_string(pair);
}

double channel_noise_power(int idx, int n) { return idx >= 4 * n ? 1.0 : 2.0; }

bool channel_is_pminus(int idx, int n) { return idx < 4 * n && idx % 4 == 3; }

Witness make_witness(int n, const std::string& label) {
    Witness w;
    w.w.assign(static_cast<size_t>(channel_count(n)), 0.0);
    w.label = label;
    return w;
}

TransferMatrix transfer_closed_form(const OpoParams& p, const SteadyState& ss, double omega) {
    p.validate();
    if (!(omega > 0.0)) throw std::invalid_argument("closed-form transfer needs omega > 0");

    const int n = p.n;
    const int nc = channel_count(n);
    const double ka = p.k_a, kp = p.k_p, chi = p.chi;
    const double A = ss.alpha_sq_sum();
    const double g = 8.0 * chi * chi * A;

    const std::complex<double> iw = I * omega;
    const std::complex<double> da = 2.0 * ka + iw;
    const std::complex<double> dq = iw * (kp + iw) + g;
    const std::complex<double> dp = da * (kp + iw) + g;

    // a vanishing denominator means omega sits exactly on a resonance of the
    // linearized system; refuse to evaluate there
    const double scale = omega * (kp + omega) + g;
    if (std::abs(dq) < 1e-12 * scale || std::abs(dp) < 1e-12 * (scale + 2.0 * ka * kp))
        throw NumericalError("transfer evaluated on a resonance denominator");

    TransferMatrix T;
    T.omega = omega;
    T.t = Eigen::MatrixXcd::Zero(nc, nc);
    T.row_valid.assign(static_cast<size_t>(nc), 1);

    const double root = std::sqrt(ka * kp);
    const int qpu = channel_index(Chan::Qpump, 0, n);
    const int ppu = channel_index(Chan::Ppump, 0, n);

    for (int i = 1; i <= n; ++i) {
        const double ai = ss.alpha[static_cast<size_t>(i - 1)];
        const int qpi = channel_index(Chan::Qplus, i, n);
        const int qmi = channel_index(Chan::Qminus, i, n);
        const int ppi = channel_index(Chan::Pplus, i, n);
        const int pmi = channel_index(Chan::Pminus, i, n);

        T.t(qmi, qmi) = -iw / da;
        T.t(pmi, pmi) = -1.0 - 2.0 * I * ka / omega;

        for (int j = 1; j <= n; ++j) {
            const double aj = ss.alpha[static_cast<size_t>(j - 1)];
            const int qpj = channel_index(Chan::Qplus, j, n);
            const int ppj = channel_index(Chan::Pplus, j, n);
            const std::complex<double> cross = 16.0 * chi * chi * ka * ai * aj;
            T.t(qpi, qpj) = -cross / (iw * dq);
            T.t(ppi, ppj) = -cross / (da * dp);
            if (i == j) {
                T.t(qpi, qpj) += -1.0 + 2.0 * ka / iw;
                T.t(ppi, ppj) += -1.0 + 2.0 * ka / da;
            }
        }
        T.t(qpi, qpu) = 8.0 * chi * root * ai / dq;
        T.t(ppi, ppu) = 8.0 * chi * root * ai / dp;
        T.t(qpu, qpi) = -4.0 * chi * root * ai / dq;
        T.t(ppu, ppi) = -4.0 * chi * root * ai / dp;
    }
    T.t(qpu, qpu) = (I * kp * omega + omega * omega - g) / dq;
    T.t(ppu, ppu) = (da * (kp - iw) - g) / dp;
    return T;
}

TransferMatrix transfer_numeric(const OpoParams& p, const SteadyState& ss, double omega) {
    p.validate();
    if (!(omega >= 0.0)) throw std::invalid_argument("omega must be nonnegative");

    const int n = p.n;
    const int nc = channel_count(n);
    const double ka = p.k_a, kp = p.k_p, chi = p.chi;

    TransferMatrix T;
    T.omega = omega;
    T.t = Eigen::MatrixXcd::Zero(nc, nc);
    T.row_valid.assign(static_cast<size_t>(nc), 0);

    // Internal quadrature drift, assembled sector by sector. The minus
    // channels are scalars; the plus channels of one kind share the pump.
    auto solve_sector = [&](const std::vector<int>& idx, const Eigen::MatrixXd& drift) {
        const int m = static_cast<int>(idx.size());
        Eigen::MatrixXcd M = I * omega * Eigen::MatrixXd::Identity(m, m) - drift;
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
        if (!lu.isInvertible()) {
            if (omega > 0.0)
                throw NumericalError("frequency-domain system is singular at omega = " +
                                     std::to_string(omega));
            return;  // no response at DC for this sector; rows stay flagged off
        }
        Eigen::VectorXd kc(m);
        for (int c = 0; c < m; ++c) kc(c) = idx[static_cast<size_t>(c)] >= 4 * n ? kp : ka;
        Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(m, m);
        for (int c = 0; c < m; ++c) B(c, c) = std::sqrt(2.0 * kc(c));
        Eigen::MatrixXcd X = lu.solve(B);
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                std::complex<double> out = std::sqrt(2.0 * kc(r)) * X(r, c);
                if (r == c) out -= 1.0;
                T.t(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]) = out;
            }
            T.row_valid[static_cast<size_t>(idx[static_cast<size_t>(r)])] = 1;
        }
    };

    for (int i = 1; i <= n; ++i) {
        Eigen::MatrixXd d1(1, 1);
        d1(0, 0) = -2.0 * ka;
        solve_sector({channel_index(Chan::Qminus, i, n)}, d1);
        d1(0, 0) = 0.0;  // the minus phase combination is driven but undamped
        solve_sector({channel_index(Chan::Pminus, i, n)}, d1);
    }

    std::vector<int> qsec, psec;
    for (int i = 1; i <= n; ++i) qsec.push_back(channel_index(Chan::Qplus, i, n));
    qsec.push_back(channel_index(Chan::Qpump, 0, n));
    for (int i = 1; i <= n; ++i) psec.push_back(channel_index(Chan::Pplus, i, n));
    psec.push_back(channel_index(Chan::Ppump, 0, n));

    Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int i = 0; i < n; ++i) {
        const double ai = ss.alpha[static_cast<size_t>(i)];
        dq(i, n) = 4.0 * chi * ai;
        dq(n, i) = -2.0 * chi * ai;
        dp(i, i) = -2.0 * ka;
        dp(i, n) = 4.0 * chi * ai;
        dp(n, i) = -2.0 * chi * ai;
    }
    dq(n, n) = -kp;
    dp(n, n) = -kp;
    solve_sector(qsec, dq);
    solve_sector(psec, dp);
    return T;
}

double witness_variance(const Witness& w, const TransferMatrix& T) {
    const int nc = static_cast<int>(T.t.rows());
    const int n = (nc - 2) / 4;
    if (static_cast<int>(w.w.size()) != nc)
        throw std::invalid_argument("witness dimension does not match transfer matrix");
    for (int c = 0; c < nc; ++c)
        if (w.w[static_cast<size_t>(c)] != 0.0 && !T.row_valid[static_cast<size_t>(c)])
            throw std::invalid_argument("witness weights channel " + channel_name(c, n) +
                                        " which has no response at omega = " +
                                        std::to_string(T.omega));
    double v = 0.0;
    for (int in = 0; in < nc; ++in) {
        std::complex<double> amp = 0.0;
        for (int out = 0; out < nc; ++out) {
            const double ww = w.w[static_cast<size_t>(out)];
            if (ww != 0.0) amp += ww * T.t(out, in);
        }
        v += channel_noise_power(in, n) * std::norm(amp);
    }
    return v;
}

double witness_shot_reference(const Witness& w, int n) {
    double v = 0.0;
    for (size_t c = 0; c < w.w.size(); ++c)
        v += w.w[c] * w.w[c] * channel_noise_power(static_cast<int>(c), n);
    return v;
}

TransferCache::TransferCache(const OpoParams& p, const SteadyState& ss) : params_(p), ss_(ss) {}

const TransferMatrix& TransferCache::at_level(int m) {
    auto it = levels_.find(m);
    if (it != levels_.end()) return it->second;
    const double omega = params_.k_a * std::ldexp(1.0, -m);
    return levels_.emplace(m, transfer_closed_form(params_, ss_, omega)).first->second;
}

double witness_variance_dc(const Witness& w, TransferCache& cache) {
    const int n = cache.params().n;
    for (size_t c = 0; c < w.w.size(); ++c)
        if (w.w[c] != 0.0 && channel_is_pminus(static_cast<int>(c), n))
            throw std::invalid_argument("P- channels have no DC limit; witness '" + w.label +
                                        "' cannot be evaluated at omega = 0");

    // Richardson extrapolation in omega^2 down a dyadic omega ladder.
    constexpr int m_lo = 10, m_hi = 40;
    constexpr double rel_tol = 1e-8, abs_floor = 1e-12;

    std::vector<double> raw;
    std::vector<std::vector<double>> tab;  // tab[k] is row k of the tableau
    int grow_streak = 0;

    for (int m = m_lo; m <= m_hi; ++m) {
        const double vm = witness_variance(w, cache.at_level(m));
        if (!raw.empty()) {
            if (vm > raw.back()) {
                // halving omega quadruples an omega^-2 divergence
                const double slope = -std::log2(vm / raw.back());
                ++grow_streak;
                if (grow_streak >= 3 && std::abs(slope + 2.0) <= 0.1)
                    return std::numeric_limits<double>::infinity();
            } else {
                grow_streak = 0;
            }
        }
        raw.push_back(vm);

        std::vector<double> row{vm};
        const size_t k = tab.size();
        for (size_t j = 1; j <= k; ++j) {
            const double pow4 = std::ldexp(1.0, static_cast<int>(2 * j));  // 4^j
            row.push_back(row[j - 1] + (row[j - 1] - tab[k - 1][j - 1]) / (pow4 - 1.0));
        }
        tab.push_back(row);
        if (k >= 1) {
            const double cur = row.back(), prev = tab[k - 1].back();
            if (std::abs(cur - prev) <= rel_tol * std::abs(cur) + abs_floor)
                return cur;
        }
    }

    std::ostringstream msg;
    msg << "DC extrapolation did not converge for witness '" << w.label
        << "'; last estimates " << tab[tab.size() - 2].back() << ", " << tab.back().back();
    throw NumericalError(msg.str());
}

double witness_variance_dc(const Witness& w, const OpoParams& p, const SteadyState& ss) {
    TransferCache cache(p, ss);
    return witness_variance_dc(w, cache);
}

}  // namespace opo

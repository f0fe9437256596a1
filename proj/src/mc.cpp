#include "opo/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "opo/stability.hpp"
#include "opo/witnesses.hpp"

namespace opo {

namespace {

uint64_t splitmix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Box-Muller on explicit 53-bit uniforms; the standard library's
// normal_distribution is implementation-defined, this is not.
struct NormalGen {
    std::mt19937_64 eng;
    double spare = 0.0;
    bool has_spare = false;

    explicit NormalGen(uint64_t s) : eng(s) {}

    double uniform() { return (static_cast<double>(eng() >> 11) + 0.5) * 0x1p-53; }

    double next() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double a = 2.0 * std::numbers::pi * uniform();
        spare = r * std::sin(a);
        has_spare = true;
        return r * std::cos(a);
    }
};

struct SimPlan {
    int n = 0;
    double ka = 0, kp = 0, chi = 0, dt = 0;
    std::vector<double> alpha;
    // which dynamical blocks the witness needs
    std::vector<int> qm_pairs;  // 0-based pairs with Q- weight
    std::vector<double> qm_w;
    bool need_q = false, need_p = false;
    std::vector<double> wq, wp;  // weights on Q+ / P+ per pair
    double wqp = 0, wpp = 0;     // pump weights
    size_t n_burn = 0, n_win = 0;
    std::vector<double> win_full, win_half;  // tapers, already normalized
};

double run_trajectory(const SimPlan& pl, NormalGen& ng) {
    const int n = pl.n;
    const double dt = pl.dt;
    const double s2a = std::sqrt(2.0 * pl.ka), s2p = std::sqrt(2.0 * pl.kp);
    const double sd_pair = std::sqrt(2.0 * dt), sd_pump = std::sqrt(dt);

    std::vector<double> qm(pl.qm_pairs.size(), 0.0);
    std::vector<double> qs(pl.need_q ? n : 0, 0.0), ps(pl.need_p ? n : 0, 0.0);
    double qp = 0.0, pp = 0.0;
    std::vector<double> dwq(n), dwp(n);

    double y_full = 0.0, y_a = 0.0, y_b = 0.0;
    const size_t half = pl.n_win / 2;
    const size_t total = pl.n_burn + pl.n_win;

    for (size_t t = 0; t < total; ++t) {
        double s = 0.0;  // witness output increment, built from pre-update state

        for (size_t m = 0; m < qm.size(); ++m) {
            const double dw = ng.next() * sd_pair;
            s += pl.qm_w[m] * (s2a * qm[m] * dt - dw);
            qm[m] += -2.0 * pl.ka * qm[m] * dt + s2a * dw;
        }
        if (pl.need_q) {
            for (int i = 0; i < n; ++i) dwq[i] = ng.next() * sd_pair;
            const double dwpump = ng.next() * sd_pump;
            double proj = 0.0;
            for (int i = 0; i < n; ++i) {
                s += pl.wq[i] * (s2a * qs[i] * dt - dwq[i]);
                proj += pl.alpha[i] * qs[i];
            }
            s += pl.wqp * (s2p * qp * dt - dwpump);
            for (int i = 0; i < n; ++i)
                qs[i] += 4.0 * pl.chi * pl.alpha[i] * qp * dt + s2a * dwq[i];
            qp += (-pl.kp * qp - 2.0 * pl.chi * proj) * dt + s2p * dwpump;
        }
        if (pl.need_p) {
            for (int i = 0; i < n; ++i) dwp[i] = ng.next() * sd_pair;
            const double dwpump = ng.next() * sd_pump;
            double proj = 0.0;
            for (int i = 0; i < n; ++i) {
                s += pl.wp[i] * (s2a * ps[i] * dt - dwp[i]);
                proj += pl.alpha[i] * ps[i];
            }
            s += pl.wpp * (s2p * pp * dt - dwpump);
            for (int i = 0; i < n; ++i)
                ps[i] += (-2.0 * pl.ka * ps[i] + 4.0 * pl.chi * pl.alpha[i] * pp) * dt +
                         s2a * dwp[i];
            pp += (-pl.kp * pp - 2.0 * pl.chi * proj) * dt + s2p * dwpump;
        }

        if ((t & 1023u) == 0u) {
            double worst = std::abs(qp) + std::abs(pp);
            for (double v : qs) worst = std::max(worst, std::abs(v));
            for (double v : ps) worst = std::max(worst, std::abs(v));
            for (double v : qm) worst = std::max(worst, std::abs(v));
            if (!(worst < 1e6)) throw NumericalError("trajectory diverged; dynamics unstable");
        }

        if (t >= pl.n_burn) {
            const size_t q = t - pl.n_burn;
            y_full += pl.win_full[q] * s;
            if (q < half)
                y_a += pl.win_half[q] * s;
            else
                y_b += pl.win_half[q - half] * s;
        }
    }

    // half-window Richardson step: window bias scales as 1/T^2
    return (4.0 * y_full * y_full - 0.5 * (y_a * y_a + y_b * y_b)) / 3.0;
}

}  // namespace

McResult simulate_dc_variance(const Witness& w, const OpoParams& p, const SteadyState& ss,
                              const SimConfig& cfg) {
    p.validate();
    const int n = p.n;
    if (static_cast<int>(w.w.size()) != channel_count(n))
        throw std::invalid_argument("witness dimension does not match params");
    if (cfg.n_traj < 1) throw std::invalid_argument("n_traj must be at least 1");

    bool any = false;
    for (size_t c = 0; c < w.w.size(); ++c) {
        if (w.w[c] == 0.0) continue;
        any = true;
        if (channel_is_pminus(static_cast<int>(c), n))
            throw std::invalid_argument("P- channels have no DC limit; cannot simulate witness '" +
                                        w.label + "' at omega = 0");
    }
    if (!any) throw std::invalid_argument("witness has no nonzero weight");

    SimPlan pl;
    pl.n = n;
    pl.ka = p.k_a;
    pl.kp = p.k_p;
    pl.chi = p.chi;
    pl.alpha = ss.alpha;

    pl.wq.assign(n, 0.0);
    pl.wp.assign(n, 0.0);
    for (int i = 1; i <= n; ++i) {
        const double wqm = w.w[channel_index(Chan::Qminus, i, n)];
        if (wqm != 0.0) {
            pl.qm_pairs.push_back(i - 1);
            pl.qm_w.push_back(wqm);
        }
        pl.wq[i - 1] = w.w[channel_index(Chan::Qplus, i, n)];
        pl.wp[i - 1] = w.w[channel_index(Chan::Pplus, i, n)];
    }
    pl.wqp = w.w[channel_index(Chan::Qpump, 0, n)];
    pl.wpp = w.w[channel_index(Chan::Ppump, 0, n)];
    pl.need_q = pl.wqp != 0.0;
    pl.need_p = pl.wpp != 0.0;
    for (int i = 0; i < n; ++i) {
        if (pl.wq[i] != 0.0) pl.need_q = true;
        if (pl.wp[i] != 0.0) pl.need_p = true;
    }

    const double kmax = std::max(p.k_a, p.k_p);
    pl.dt = cfg.dt > 0.0 ? cfg.dt : 0.005 / kmax;
    if (pl.dt > 0.01 / kmax)
        throw std::invalid_argument("dt too coarse: need dt <= 0.01/max(k_a, k_p)");

    // slowest decaying eigenvalue sets the burn-in and default window scales;
    // marginal zero modes never relax but carry no witness output at DC
    double slowest = 2.0 * p.k_a;
    for (const auto& l : eigenvalues_closed_form(p))
        if (l.real() < -1e-9 * p.k_a) slowest = std::min(slowest, -l.real());

    const double burn = cfg.burn_in > 0.0 ? cfg.burn_in : 10.0 / slowest;
    double window;
    if (cfg.lowpass_bandwidth > 0.0)
        window = 1.0 / cfg.lowpass_bandwidth;
    else if (cfg.t_total > 0.0)
        window = cfg.t_total - burn;
    else
        window = 100.0 / slowest;
    if (!(window > 10.0 * pl.dt))
        throw std::invalid_argument("averaging window too short for the requested dt");

    pl.n_burn = static_cast<size_t>(std::ceil(burn / pl.dt));
    pl.n_win = static_cast<size_t>(std::ceil(window / pl.dt));
    if (pl.n_win % 2) ++pl.n_win;

    // Hann tapers for the full window and the two halves; 3/8 is the mean
    // square of the taper, so E[y^2] estimates the DC spectral density
    const double T = static_cast<double>(pl.n_win) * pl.dt;
    const double norm_full = 1.0 / std::sqrt(0.375 * T);
    const double norm_half = 1.0 / std::sqrt(0.375 * T / 2.0);
    pl.win_full.resize(pl.n_win);
    pl.win_half.resize(pl.n_win / 2);
    for (size_t q = 0; q < pl.n_win; ++q) {
        const double u = (static_cast<double>(q) + 0.5) / static_cast<double>(pl.n_win);
        pl.win_full[q] = norm_full * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u));
    }
    for (size_t q = 0; q < pl.n_win / 2; ++q) {
        const double u = (static_cast<double>(q) + 0.5) / static_cast<double>(pl.n_win / 2);
        pl.win_half[q] = norm_half * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u));
    }

    const int M = cfg.n_traj;
    std::vector<double> z(static_cast<size_t>(M));
    const uint64_t s0 = splitmix64(cfg.seed);
    std::exception_ptr failure;

    auto run_range = [&](int lo, int hi) {
        try {
            for (int i = lo; i < hi; ++i) {
                NormalGen ng(splitmix64(s0 ^ (static_cast<uint64_t>(i) * 0x9E3779B97F4A7C15ULL)));
                z[static_cast<size_t>(i)] = run_trajectory(pl, ng);
            }
        } catch (...) {
            if (!failure) failure = std::current_exception();
        }
    };

    const int nthreads = std::min(resolve_thread_count(cfg.threads), M);
    if (nthreads <= 1) {
        run_range(0, M);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (M + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back(run_range, t * chunk, std::min(M, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= M;
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var = M > 1 ? var / (M - 1) : 0.0;

    McResult r;
    r.estimate = mean;
    r.stderr_ = std::sqrt(var / M);
    r.under_sampled = r.stderr_ > 0.1 * std::abs(r.estimate);
    r.dt = pl.dt;
    r.burn_in = burn;
    r.window = T;
    return r;
}

}  // namespace opo

#include "opo/witnesses.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace opo {

namespace {

struct ModeWeights {
    // one entry per pair for the +i and -i modes, plus the pump
    std::vector<double> h_plus, h_minus, g_all;  // g is common to +i and -i
    double h_p = 0.0, g_p = 0.0;
    // partition flags: mode in the A side of the split
    std::vector<char> a_plus, a_minus;
    bool a_pump = false;
};

double partition_bound(const ModeWeights& mw) {
    double sum_a = 0.0, sum_b = 0.0;
    const size_t n = mw.h_plus.size();
    for (size_t i = 0; i < n; ++i) {
        const double hp = mw.h_plus[i] * mw.g_all[i];
        const double hm = mw.h_minus[i] * mw.g_all[i];
        (mw.a_plus[i] ? sum_a : sum_b) += hp;
        (mw.a_minus[i] ? sum_a : sum_b) += hm;
    }
    (mw.a_pump ? sum_a : sum_b) += mw.h_p * mw.g_p;
    return 2.0 * (std::abs(sum_a) + std::abs(sum_b));
}

std::vector<double> profile_ratios(const OpoParams& p, int ref) {
    const std::vector<double> w = p.profile_or_equal();
    const double wr = w[static_cast<size_t>(ref - 1)];
    if (!(wr > 0.0))
        throw std::invalid_argument("reference pair " + std::to_string(ref) +
                                    " has zero amplitude weight");
    std::vector<double> r(w.size());
    for (size_t i = 0; i < w.size(); ++i) r[i] = w[i] / wr;
    return r;
}

}  // namespace

bool kind_has_x(VlfKind k) {
    return k == VlfKind::S1 || k == VlfKind::S2 || k == VlfKind::S3;
}

VlfKind vlf_kind_from_string(const std::string& s) {
    if (s == "S1") return VlfKind::S1;
    if (s == "S2") return VlfKind::S2;
    if (s == "S3") return VlfKind::S3;
    if (s == "S4") return VlfKind::S4;
    if (s == "S2p" || s == "S2prime") return VlfKind::S2prime;
    throw std::invalid_argument("unknown witness kind '" + s + "' (use S1|S2|S3|S4|S2p)");
}

std::string to_string(VlfKind k) {
    switch (k) {
        case VlfKind::S1: return "S1";
        case VlfKind::S2: return "S2";
        case VlfKind::S3: return "S3";
        case VlfKind::S4: return "S4";
        default: return "S2p";
    }
}

VlfCase build_case(VlfKind kind, const OpoParams& p, const SteadyState& ss, int j, int k,
                   double x) {
    p.validate();
    if (static_cast<int>(ss.alpha.size()) != p.n)
        throw std::invalid_argument("steady state dimension does not match params");
    const int n = p.n;
    if (j < 1 || j > n) throw std::invalid_argument("pair index j out of range");
    if ((kind == VlfKind::S3 || kind == VlfKind::S4) && (k < 1 || k >= n))
        throw std::invalid_argument("split position k must satisfy 1 <= k < n");
    if (kind_has_x(kind) && !(x > 0.0)) throw std::invalid_argument("x must be positive");

    ModeWeights mw;
    mw.h_plus.assign(static_cast<size_t>(n), 0.0);
    mw.h_minus.assign(static_cast<size_t>(n), 0.0);
    mw.g_all.assign(static_cast<size_t>(n), 0.0);
    mw.a_plus.assign(static_cast<size_t>(n), 0);
    mw.a_minus.assign(static_cast<size_t>(n), 0);

    switch (kind) {
        case VlfKind::S1: {
            const std::vector<double> r = profile_ratios(p, 1);
            double rsum = 0.0;
            for (int i = 0; i < n; ++i) {
                mw.h_plus[i] = mw.h_minus[i] = r[static_cast<size_t>(i)];
                mw.g_all[i] = 1.0;
                rsum += r[static_cast<size_t>(i)];
            }
            mw.h_p = 2.0 * rsum / x;
            mw.g_p = -x;
            mw.a_pump = true;
            break;
        }
        case VlfKind::S2:
        case VlfKind::S2prime: {
            const std::vector<double> r = profile_ratios(p, j);
            double rsum = 0.0, rother = 0.0;
            for (int i = 0; i < n; ++i) {
                const double ri = r[static_cast<size_t>(i)];
                mw.h_plus[i] = mw.h_minus[i] = ri;
                rsum += ri;
                if (i != j - 1) {
                    rother += ri;
                    mw.g_all[i] = -1.0;
                }
            }
            mw.g_all[static_cast<size_t>(j - 1)] = rother;
            mw.h_p = kind == VlfKind::S2 ? 2.0 * rsum / x : 0.0;
            mw.g_p = 0.0;
            mw.a_plus[static_cast<size_t>(j - 1)] = 1;
            mw.a_minus[static_cast<size_t>(j - 1)] = 1;
            break;
        }
        case VlfKind::S3: {
            const std::vector<double> w = p.profile_or_equal();
            const std::vector<double> r1 = profile_ratios(p, 1);
            double rsum = 0.0;
            for (int i = 0; i < n; ++i) rsum += r1[static_cast<size_t>(i)];
            for (int m = 1; m <= n; ++m) {
                mw.h_plus[m - 1] = mw.h_minus[m - 1] = m <= k ? 1.0 : r1[static_cast<size_t>(m - 1)];
                if (!(w[static_cast<size_t>(m - 1)] > 0.0))
                    throw std::invalid_argument("zero amplitude weight inside an S3 split");
                double g = m <= k ? static_cast<double>(n - 1) : 0.0;
                for (int i = 1; i <= k; ++i)
                    if (i != m) g -= w[static_cast<size_t>(i - 1)] / w[static_cast<size_t>(m - 1)];
                mw.g_all[m - 1] = g;
                if (m <= k) {
                    mw.a_plus[m - 1] = 1;
                    mw.a_minus[m - 1] = 1;
                }
            }
            mw.h_p = 2.0 * rsum / x;
            mw.g_p = 0.0;
            break;
        }
        case VlfKind::S4: {
            const std::vector<double> r = profile_ratios(p, j);
            double rother = 0.0;
            for (int i = 0; i < n; ++i) {
                const double ri = r[static_cast<size_t>(i)];
                mw.h_plus[i] = ri;
                mw.h_minus[i] = -ri;
                if (i != j - 1) rother += ri;
                mw.g_all[i] = i == j - 1 ? 0.0 : 1.0;
            }
            mw.g_all[static_cast<size_t>(j - 1)] = -rother;
            for (int i = 1; i <= k; ++i) mw.a_plus[static_cast<size_t>(i - 1)] = 1;
            break;
        }
    }

    VlfCase c;
    c.kind = kind;
    c.j = j;
    c.k = k;
    c.x = kind_has_x(kind) ? x : 0.0;
    c.bound = partition_bound(mw);
    c.u = make_witness(n, "u_" + to_string(kind));
    c.v = make_witness(n, "v_" + to_string(kind));
    for (int i = 1; i <= n; ++i) {
        c.u.w[static_cast<size_t>(channel_index(Chan::Qplus, i, n))] =
            0.5 * (mw.h_plus[i - 1] + mw.h_minus[i - 1]);
        c.u.w[static_cast<size_t>(channel_index(Chan::Qminus, i, n))] =
            0.5 * (mw.h_plus[i - 1] - mw.h_minus[i - 1]);
        c.v.w[static_cast<size_t>(channel_index(Chan::Pplus, i, n))] = mw.g_all[i - 1];
    }
    c.u.w[static_cast<size_t>(channel_index(Chan::Qpump, 0, n))] = mw.h_p;
    c.v.w[static_cast<size_t>(channel_index(Chan::Ppump, 0, n))] = mw.g_p;
    return c;
}

VlfResult evaluate(const VlfCase& c, TransferCache& cache) {
    VlfResult r;
    r.bound = c.bound;
    r.x_opt = c.x;
    const double vu = witness_variance_dc(c.u, cache);
    const double vv = witness_variance_dc(c.v, cache);
    r.S = vu + vv;
    r.violation = r.S - r.bound;
    r.converged = true;
    return r;
}

VlfResult evaluate(const VlfCase& c, const OpoParams& p, const SteadyState& ss) {
    TransferCache cache(p, ss);
    return evaluate(c, cache);
}

std::pair<double, VlfResult> optimize_x(VlfKind kind, const OpoParams& p, const SteadyState& ss,
                                        int j, int k) {
    if (!kind_has_x(kind))
        throw std::invalid_argument(to_string(kind) + " has no free weight x to optimize");
    TransferCache cache(p, ss);

    auto S_of = [&](double t) {
        return evaluate(build_case(kind, p, ss, j, k, std::exp(t)), cache).S;
    };

    const double t_lo = std::log(1e-3), t_hi = std::log(1e3);
    constexpr int scan_points = 50;
    std::vector<double> ts(scan_points), vs(scan_points);
    for (int i = 0; i < scan_points; ++i) {
        ts[i] = t_lo + (t_hi - t_lo) * i / (scan_points - 1);
        vs[i] = S_of(ts[i]);
    }
    int imin = 0;
    int local_minima = 0;
    for (int i = 0; i < scan_points; ++i) {
        if (vs[i] < vs[imin]) imin = i;
        if (i > 0 && i + 1 < scan_points && vs[i] < vs[i - 1] && vs[i] < vs[i + 1]) ++local_minima;
    }
    if (local_minima > 1)
        throw NumericalError("S(x) pre-scan found multiple local minima; "
                             "the assumed quadratic-in-x structure does not hold here");

    const bool pinned = imin == 0 || imin == scan_points - 1;
    double a = ts[std::max(imin - 1, 0)];
    double b = ts[std::min(imin + 1, scan_points - 1)];

    // golden section on log x; the interval tolerance is the relative
    // tolerance on x itself
    constexpr double tol = 1e-8;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = b - gr * (b - a);
    double c2 = a + gr * (b - a);
    double f1 = S_of(c1), f2 = S_of(c2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = S_of(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = S_of(c2);
        }
    }
    const double x_opt = std::exp(0.5 * (a + b));
    VlfResult res = evaluate(build_case(kind, p, ss, j, k, x_opt), cache);
    res.x_opt = x_opt;
    res.boundary_pinned = pinned;
    return {x_opt, res};
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OPOCOMB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

SurfaceGrid scan_surface(VlfKind kind, const std::vector<double>& sigma_axis,
                         const std::vector<int>& n_axis, const OpoParams& tmpl, int j, int k,
                         int threads) {
    SurfaceGrid g;
    g.sigma_axis = sigma_axis;
    g.n_axis = n_axis;
    g.kind = kind;
    const size_t cells = sigma_axis.size() * n_axis.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    g.violation.assign(cells, nan);
    g.x_opt.assign(cells, nan);
    g.S.assign(cells, nan);
    g.bound.assign(cells, nan);
    g.valid.assign(cells, 0);

    auto run_cell = [&](size_t ni, size_t si) {
        OpoParams p = tmpl;
        p.n = n_axis[ni];
        p.sigma = sigma_axis[si];
        if (static_cast<int>(p.amplitude_profile.size()) != p.n) p.amplitude_profile.clear();
        const size_t c = g.cell(ni, si);
        try {
            const SteadyState ss = steady_state(p);
            VlfResult r;
            if (kind_has_x(kind)) {
                r = optimize_x(kind, p, ss, j, k).second;
                g.x_opt[c] = r.x_opt;
            } else {
                r = evaluate(build_case(kind, p, ss, j, k, 1.0), p, ss);
            }
            g.violation[c] = r.violation;
            g.S[c] = r.S;
            g.bound[c] = r.bound;
            g.valid[c] = 1;
        } catch (const std::exception&) {
            // cell stays masked
        }
    };

    const int nthreads = resolve_thread_count(threads);
    if (nthreads <= 1 || cells < 2) {
        for (size_t ni = 0; ni < n_axis.size(); ++ni)
            for (size_t si = 0; si < sigma_axis.size(); ++si) run_cell(ni, si);
        return g;
    }

    std::vector<std::thread> pool;
    const size_t nsig = sigma_axis.size();
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t]() {
            for (size_t c = static_cast<size_t>(t); c < cells; c += static_cast<size_t>(nthreads))
                run_cell(c / nsig, c % nsig);
        });
    }
    for (auto& th : pool) th.join();
    return g;
}

}  // namespace opo

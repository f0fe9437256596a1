// opocomb: command-line front end for the OPO frequency-comb toolkit.
// Subcommands: steady-state | stability | spectrum | vlf eval | vlf scan |
// fig2 | verify. Single evaluations emit JSON, sweeps emit CSV with '#'
// header comments and a trailing completeness marker.
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "opo/mc.hpp"
#include "opo/params.hpp"
#include "opo/spectra.hpp"
#include "opo/stability.hpp"
#include "opo/witnesses.hpp"

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json jnum(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

struct ParamFlags {
    double kappa = 1.0, k_a = 1.0, chi = 1.0, sigma = 1.0;
    int n = 1;
    std::string profile;  // comma-separated relative weights
    std::string params_file;

    CLI::Option *o_kappa = nullptr, *o_ka = nullptr, *o_chi = nullptr, *o_sigma = nullptr,
                *o_n = nullptr, *o_profile = nullptr;

    void attach(CLI::App* sub) {
        o_kappa = sub->add_option("--kappa", kappa, "pump-signal loss ratio k_p/k_a");
        o_sigma = sub->add_option("--sigma", sigma, "pump power over threshold power");
        o_n = sub->add_option("--n", n, "number of signal/idler pairs");
        o_ka = sub->add_option("--k-a", k_a, "signal loss rate (unit scale)");
        o_chi = sub->add_option("--chi", chi, "nonlinear coupling");
        o_profile = sub->add_option("--profile", profile,
                                    "comma-separated relative amplitude weights (default equal)");
        sub->add_option("--params", params_file,
                        "JSON file {kappa, sigma, n, profile?, k_a?, chi?}; explicit flags win");
    }

    // precedence: explicit flag > params file > built-in default
    opo::OpoParams resolve() const {
        double r_ka = k_a, r_kappa = kappa, r_chi = chi, r_sigma = sigma;
        int r_n = n;
        std::vector<double> r_profile;
        if (!profile.empty()) {
            std::string tok;
            std::istringstream s(profile);
            while (std::getline(s, tok, ',')) {
                try {
                    r_profile.push_back(std::stod(tok));
                } catch (const std::exception&) {
                    throw std::invalid_argument("bad profile entry '" + tok + "'");
                }
            }
        }
        if (!params_file.empty()) {
            std::ifstream in(params_file);
            if (!in) throw std::invalid_argument("cannot read params file " + params_file);
            json j;
            try {
                in >> j;
            } catch (const json::parse_error& e) {
                throw std::invalid_argument("bad JSON in " + params_file + ": " + e.what());
            }
            if (!o_ka->count()) r_ka = j.value("k_a", r_ka);
            if (!o_kappa->count()) r_kappa = j.value("kappa", r_kappa);
            if (!o_chi->count()) r_chi = j.value("chi", r_chi);
            if (!o_n->count()) r_n = j.value("n", r_n);
            if (!o_sigma->count()) r_sigma = j.value("sigma", r_sigma);
            if (!o_profile->count() && j.contains("profile"))
                r_profile = j["profile"].get<std::vector<double>>();
        }
        opo::OpoParams p;
        p.k_a = r_ka;
        p.k_p = r_kappa * r_ka;
        p.chi = r_chi;
        p.n = r_n;
        p.sigma = r_sigma;
        p.amplitude_profile = std::move(r_profile);
        p.validate();
        return p;
    }
};

json params_json(const opo::OpoParams& p) {
    json j{{"k_a", p.k_a}, {"k_p", p.k_p}, {"kappa", p.kappa()}, {"chi", p.chi},
           {"n", p.n},     {"sigma", p.sigma}};
    j["profile"] = p.profile_or_equal();
    return j;
}

struct Sink {
    std::ofstream file;
    std::ostream* os = nullptr;

    explicit Sink(const std::string& path) {
        if (path.empty() || path == "-") {
            os = &std::cout;
        } else {
            file.open(path);
            if (!file) throw std::invalid_argument("cannot open output file " + path);
            os = &file;
        }
    }
    std::ostream& out() { return *os; }
};

void csv_header(std::ostream& os, const opo::OpoParams& p, const std::string& extra = "") {
    os << "# opocomb " << kVersion << "\n";
    os << "# params: " << params_json(p).dump() << "\n";
    if (!extra.empty()) os << "# " << extra << "\n";
}

// witness mini-language: comma-separated coef*channel terms, channels
// Qp, Pp, Q+i, Q-i, P+i, P-i (i is the 1-based pair index)
opo::Witness parse_witness(const std::string& spec, int n) {
    opo::Witness w = opo::make_witness(n, spec);
    std::istringstream terms(spec);
    std::string term;
    bool any = false;
    while (std::getline(terms, term, ',')) {
        const auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        term = strip(term);
        if (term.empty()) continue;
        const auto star = term.find('*');
        if (star == std::string::npos)
            throw std::invalid_argument("witness term '" + term + "' is not coef*channel");
        const std::string coef_s = strip(term.substr(0, star));
        const std::string chan_s = strip(term.substr(star + 1));
        double coef;
        size_t used = 0;
        try {
            coef = std::stod(coef_s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad coefficient '" + coef_s + "'");
        }
        if (used != coef_s.size()) throw std::invalid_argument("bad coefficient '" + coef_s + "'");

        int idx;
        if (chan_s == "Qp") {
            idx = opo::channel_index(opo::Chan::Qpump, 0, n);
        } else if (chan_s == "Pp") {
            idx = opo::channel_index(opo::Chan::Ppump, 0, n);
        } else if (chan_s.size() >= 3 && (chan_s[0] == 'Q' || chan_s[0] == 'P') &&
                   (chan_s[1] == '+' || chan_s[1] == '-')) {
            int pair;
            try {
                size_t u2 = 0;
                pair = std::stoi(chan_s.substr(2), &u2);
                if (u2 != chan_s.size() - 2) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw std::invalid_argument("bad channel '" + chan_s + "'");
            }
            if (pair < 1 || pair > n)
                throw std::invalid_argument("channel '" + chan_s + "' out of range for n = " +
                                            std::to_string(n));
            const bool q = chan_s[0] == 'Q';
            const bool plus = chan_s[1] == '+';
            idx = opo::channel_index(q ? (plus ? opo::Chan::Qplus : opo::Chan::Qminus)
                                       : (plus ? opo::Chan::Pplus : opo::Chan::Pminus),
                                     pair, n);
        } else {
            throw std::invalid_argument("bad channel '" + chan_s + "'");
        }
        w.w[static_cast<size_t>(idx)] += coef;
        any = true;
    }
    if (!any) throw std::invalid_argument("witness spec has no terms");
    bool nonzero = false;
    for (double v : w.w) nonzero = nonzero || v != 0.0;
    if (!nonzero) throw std::invalid_argument("witness weights sum to zero everywhere");
    return w;
}

// a:b:steps inclusive, linear; log: prefix for logarithmic spacing
std::vector<double> parse_range(std::string s) {
    bool logspace = false;
    if (s.rfind("log:", 0) == 0) {
        logspace = true;
        s = s.substr(4);
    }
    std::vector<std::string> parts;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ':')) parts.push_back(tok);
    try {
        if (parts.size() == 1) return {std::stod(parts[0])};
        if (parts.size() != 3) throw std::invalid_argument("");
        const double a = std::stod(parts[0]), b = std::stod(parts[1]);
        const int steps = std::stoi(parts[2]);
        if (steps < 1) throw std::invalid_argument("");
        if (steps == 1) return {a};
        std::vector<double> v(static_cast<size_t>(steps));
        if (logspace) {
            if (!(a > 0.0 && b > 0.0))
                throw std::invalid_argument("log range needs positive endpoints");
            const double la = std::log(a), lb = std::log(b);
            for (int i = 0; i < steps; ++i)
                v[static_cast<size_t>(i)] = std::exp(la + (lb - la) * i / (steps - 1));
        } else {
            for (int i = 0; i < steps; ++i)
                v[static_cast<size_t>(i)] = a + (b - a) * i / (steps - 1);
        }
        return v;
    } catch (const std::invalid_argument& e) {
        if (e.what()[0] != '\0') throw;
        throw std::invalid_argument("bad range '" + s + "' (want a:b:steps)");
    }
}

std::vector<int> parse_int_range(const std::string& s) {
    std::vector<std::string> parts;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ':')) parts.push_back(tok);
    try {
        if (parts.size() == 1) return {std::stoi(parts[0])};
        if (parts.size() != 2) throw std::invalid_argument("");
        const int a = std::stoi(parts[0]), b = std::stoi(parts[1]);
        if (b < a) throw std::invalid_argument("");
        std::vector<int> v;
        for (int i = a; i <= b; ++i) v.push_back(i);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad integer range '" + s + "' (want a:b)");
    }
}

json eig_json(const std::vector<std::complex<double>>& ev) {
    json a = json::array();
    for (const auto& l : ev) a.push_back({l.real(), l.imag()});
    return a;
}

void run_steady_state(const ParamFlags& pf, const std::string& out_path) {
    const opo::OpoParams p = pf.resolve();
    const opo::SteadyState ss = opo::steady_state(p);
    json j{{"version", kVersion}, {"params", params_json(p)}};
    j["threshold_pump"] = opo::threshold_pump(p);
    j["alpha"] = ss.alpha;
    json sq = json::array();
    for (double a : ss.alpha) sq.push_back(a * a);
    j["alpha_sq"] = sq;
    j["pump_mean"] = ss.pump_mean;
    j["pump_in"] = ss.pump_in;
    j["phases"] = ss.phases;
    Sink sink(out_path);
    sink.out() << j.dump(2) << "\n";
}

void run_stability(const ParamFlags& pf, const std::string& out_path) {
    const opo::OpoParams p = pf.resolve();
    const opo::StabilityReport rep = opo::is_stable(p);
    json j{{"version", kVersion}, {"params", params_json(p)}};
    j["eigenvalues"] = eig_json(rep.eigenvalues);
    j["closed_form"] = eig_json(rep.closed_form_eigenvalues);
    j["stable"] = rep.stable;
    j["max_real_part"] = rep.max_real_part;
    j["match_error"] = rep.match_error;
    Sink sink(out_path);
    sink.out() << j.dump(2) << "\n";
}

void run_spectrum(const ParamFlags& pf, const std::string& witness_spec, double omega_min,
                  double omega_max, int points, bool logspace, const std::string& normalize,
                  const std::string& out_path) {
    const opo::OpoParams p = pf.resolve();
    if (points < 1) throw std::invalid_argument("--points must be at least 1");
    if (omega_min < 0.0 || omega_max < omega_min)
        throw std::invalid_argument("need 0 <= omega-min <= omega-max");
    if (logspace && !(omega_min > 0.0))
        throw std::invalid_argument("log spacing needs omega-min > 0");
    if (!normalize.empty() && normalize != "shot")
        throw std::invalid_argument("--normalize only supports 'shot'");
    const opo::SteadyState ss = opo::steady_state(p);
    const opo::Witness w = parse_witness(witness_spec, p.n);
    const double ref = normalize == "shot" ? opo::witness_shot_reference(w, p.n) : 1.0;

    Sink sink(out_path);
    std::ostream& os = sink.out();
    csv_header(os, p, "witness: " + witness_spec +
                          (normalize.empty() ? "" : " (normalized to shot reference)"));
    os << "omega,variance\n";
    int failed = 0;
    for (int i = 0; i < points; ++i) {
        double omega;
        if (points == 1) {
            omega = omega_min;
        } else if (logspace) {
            const double la = std::log(omega_min), lb = std::log(omega_max);
            omega = std::exp(la + (lb - la) * i / (points - 1));
        } else {
            omega = omega_min + (omega_max - omega_min) * i / (points - 1);
        }
        double v;
        try {
            if (omega == 0.0) {
                v = opo::witness_variance_dc(w, p, ss);
            } else {
                v = opo::witness_variance(w, opo::transfer_closed_form(p, ss, omega));
            }
            v /= ref;
        } catch (const opo::NumericalError& e) {
            std::cerr << "skipping omega = " << omega << ": " << e.what() << "\n";
            v = std::numeric_limits<double>::quiet_NaN();
            ++failed;
        }
        os << fmt(omega) << "," << fmt(v) << "\n";
    }
    os << "# complete rows=" << points << " failed=" << failed << "\n";
}

void run_vlf_eval(const ParamFlags& pf, const std::string& kind_s, int j, int k, double x,
                  bool has_x, bool optimize, const std::string& out_path) {
    const opo::OpoParams p = pf.resolve();
    const opo::VlfKind kind = opo::vlf_kind_from_string(kind_s);
    const opo::SteadyState ss = opo::steady_state(p);

    opo::VlfResult res;
    if (optimize) {
        if (has_x) throw std::invalid_argument("give either --x or --optimize, not both");
        if (!opo::kind_has_x(kind))
            throw std::invalid_argument(opo::to_string(kind) + " has no x to optimize");
        res = opo::optimize_x(kind, p, ss, j, k).second;
    } else {
        if (opo::kind_has_x(kind) && !has_x)
            throw std::invalid_argument("provide --x or --optimize for " + opo::to_string(kind));
        res = opo::evaluate(opo::build_case(kind, p, ss, j, k, has_x ? x : 1.0), p, ss);
    }

    json out{{"version", kVersion}, {"params", params_json(p)}};
    out["kind"] = opo::to_string(kind);
    out["j"] = j;
    out["k"] = k;
    out["S"] = jnum(res.S);
    out["bound"] = res.bound;
    out["violation"] = jnum(res.violation);
    if (opo::kind_has_x(kind)) out["x_opt"] = res.x_opt;
    out["converged"] = res.converged;
    out["boundary_pinned"] = res.boundary_pinned;
    Sink sink(out_path);
    sink.out() << out.dump(2) << "\n";
}

void run_vlf_scan(const ParamFlags& pf, const std::string& kind_s, const std::string& sigma_range,
                  const std::string& n_range, int j, int k, int threads,
                  const std::string& out_path) {
    const opo::OpoParams tmpl = pf.resolve();
    const opo::VlfKind kind = opo::vlf_kind_from_string(kind_s);
    const std::vector<double> sigmas = parse_range(sigma_range);
    const std::vector<int> ns = parse_int_range(n_range);
    const opo::SurfaceGrid g = opo::scan_surface(kind, sigmas, ns, tmpl, j, k, threads);

    Sink sink(out_path);
    std::ostream& os = sink.out();
    csv_header(os, tmpl, "kind: " + opo::to_string(kind) + " j=" + std::to_string(j) +
                             " k=" + std::to_string(k));
    os << "sigma,n,violation,x_opt,S,bound\n";
    int failed = 0;
    for (size_t ni = 0; ni < ns.size(); ++ni) {
        for (size_t si = 0; si < sigmas.size(); ++si) {
            const size_t c = g.cell(ni, si);
            if (!g.valid[c]) ++failed;
            os << fmt(sigmas[si]) << "," << ns[ni] << "," << fmt(g.violation[c]) << ","
               << fmt(g.x_opt[c]) << "," << fmt(g.S[c]) << "," << fmt(g.bound[c]) << "\n";
        }
    }
    os << "# complete rows=" << sigmas.size() * ns.size() << " failed=" << failed << "\n";
}

void run_fig2(const ParamFlags& pf, const std::string& x_policy, const std::string& sigma_range,
              const std::string& out_path) {
    if (x_policy != "sigma")
        throw std::invalid_argument("only --x-policy sigma is implemented");
    opo::OpoParams base = pf.resolve();
    const std::vector<double> sigmas = parse_range(sigma_range);

    Sink sink(out_path);
    std::ostream& os = sink.out();
    csv_header(os, base, "x-policy: x = sigma; raw variances");
    os << "sigma,nV_Pplus,V_v1\n";
    int failed = 0;
    for (double sig : sigmas) {
        opo::OpoParams p = base;
        p.sigma = sig;
        double nvp = std::numeric_limits<double>::quiet_NaN();
        double vv1 = std::numeric_limits<double>::quiet_NaN();
        try {
            const opo::SteadyState ss = opo::steady_state(p);
            opo::TransferCache cache(p, ss);
            opo::Witness pp = opo::make_witness(p.n);
            pp.w[static_cast<size_t>(opo::channel_index(opo::Chan::Pplus, 1, p.n))] = 1.0;
            nvp = p.n * opo::witness_variance_dc(pp, cache);
            // v_1 needs x > 0; at sigma = 1 the witness x = sigma = 1 is fine
            const opo::VlfCase c = opo::build_case(opo::VlfKind::S1, p, ss, 1, 1, sig);
            vv1 = opo::witness_variance_dc(c.v, cache);
        } catch (const std::exception& e) {
            std::cerr << "skipping sigma = " << sig << ": " << e.what() << "\n";
            ++failed;
        }
        os << fmt(sig) << "," << fmt(nvp) << "," << fmt(vv1) << "\n";
    }
    os << "# complete rows=" << sigmas.size() << " failed=" << failed << "\n";
}

void run_verify(const ParamFlags& pf, const std::string& witness_spec, int traj,
                unsigned long long seed, double dt, double t_total, double burn_in,
                double bandwidth, int threads, const std::string& out_path) {
    const opo::OpoParams p = pf.resolve();
    const opo::SteadyState ss = opo::steady_state(p);
    const opo::Witness w = parse_witness(witness_spec, p.n);

    const double analytic = opo::witness_variance_dc(w, p, ss);

    opo::SimConfig cfg;
    cfg.dt = dt;
    cfg.t_total = t_total;
    cfg.n_traj = traj;
    cfg.seed = seed;
    cfg.burn_in = burn_in;
    cfg.lowpass_bandwidth = bandwidth;
    cfg.threads = threads;
    const opo::McResult r = opo::simulate_dc_variance(w, p, ss, cfg);

    json out{{"version", kVersion}, {"params", params_json(p)}};
    out["witness"] = witness_spec;
    out["seed"] = seed;
    out["traj"] = traj;
    out["dt"] = r.dt;
    out["burn_in"] = r.burn_in;
    out["window"] = r.window;
    out["estimate"] = r.estimate;
    out["stderr"] = r.stderr_;
    out["analytic"] = jnum(analytic);
    out["sigma_distance"] =
        jnum(r.stderr_ > 0.0 ? std::abs(r.estimate - analytic) / r.stderr_
                             : std::numeric_limits<double>::infinity());
    out["under_sampled"] = r.under_sampled;
    Sink sink(out_path);
    sink.out() << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"above-threshold OPO frequency-comb entanglement toolkit"};
    app.require_subcommand(1);

    // steady-state
    auto* sc_ss = app.add_subcommand("steady-state", "classical operating point as JSON");
    ParamFlags pf_ss;
    pf_ss.attach(sc_ss);
    std::string out_ss;
    sc_ss->add_option("-o,--output", out_ss, "output path (default stdout)");
    sc_ss->callback([&] { run_steady_state(pf_ss, out_ss); });

    // stability
    auto* sc_st = app.add_subcommand("stability", "Jacobian eigenvalues and stability as JSON");
    ParamFlags pf_st;
    pf_st.attach(sc_st);
    std::string out_st;
    sc_st->add_option("-o,--output", out_st, "output path (default stdout)");
    sc_st->callback([&] { run_stability(pf_st, out_st); });

    // spectrum
    auto* sc_sp = app.add_subcommand("spectrum", "witness variance vs omega as CSV");
    ParamFlags pf_sp;
    pf_sp.attach(sc_sp);
    std::string wit_sp, norm_sp, out_sp;
    double om_min = 0.0, om_max = 1.0;
    int points = 100;
    bool logsp = false;
    sc_sp->add_option("--witness", wit_sp, "witness spec, e.g. \"1*P+1,1*P+2,-2.0*Pp\"")
        ->required();
    sc_sp->add_option("--omega-min", om_min, "lowest sideband frequency (0 = DC limit)");
    sc_sp->add_option("--omega-max", om_max, "highest sideband frequency");
    sc_sp->add_option("--points", points, "number of frequencies");
    sc_sp->add_flag("--log", logsp, "logarithmic frequency spacing");
    sc_sp->add_option("--normalize", norm_sp, "'shot' divides by the witness shot reference");
    sc_sp->add_option("-o,--output", out_sp, "output path (default stdout)");
    sc_sp->callback(
        [&] { run_spectrum(pf_sp, wit_sp, om_min, om_max, points, logsp, norm_sp, out_sp); });

    // vlf eval / vlf scan
    auto* sc_vlf = app.add_subcommand("vlf", "van Loock-Furusawa witness evaluation");
    sc_vlf->require_subcommand(1);

    auto* sc_ev = sc_vlf->add_subcommand("eval", "single witness evaluation as JSON");
    ParamFlags pf_ev;
    pf_ev.attach(sc_ev);
    std::string kind_ev, out_ev;
    int j_ev = 1, k_ev = 1;
    double x_ev = 1.0;
    bool opt_ev = false;
    sc_ev->add_option("--kind", kind_ev, "S1|S2|S3|S4|S2p")->required();
    sc_ev->add_option("--j", j_ev, "distinguished pair (S2, S4, S2p)");
    sc_ev->add_option("--k", k_ev, "split position (S3, S4)");
    auto* o_x = sc_ev->add_option("--x", x_ev, "pump weight x");
    sc_ev->add_flag("--optimize", opt_ev, "minimize S over x");
    sc_ev->add_option("-o,--output", out_ev, "output path (default stdout)");
    sc_ev->callback([&] {
        run_vlf_eval(pf_ev, kind_ev, j_ev, k_ev, x_ev, o_x->count() > 0, opt_ev, out_ev);
    });

    auto* sc_scan = sc_vlf->add_subcommand("scan", "violation surface over (sigma, n) as CSV");
    ParamFlags pf_scan;
    pf_scan.attach(sc_scan);
    std::string kind_scan, srange, nrange, out_scan;
    int j_scan = 1, k_scan = 1, threads_scan = 0;
    sc_scan->add_option("--kind", kind_scan, "S1|S2|S3|S4|S2p")->required();
    sc_scan->add_option("--sigma-range", srange, "a:b:steps (log: prefix for log spacing)")
        ->required();
    sc_scan->add_option("--n-range", nrange, "a:b inclusive")->required();
    sc_scan->add_option("--j", j_scan, "distinguished pair");
    sc_scan->add_option("--k", k_scan, "split position");
    sc_scan->add_option("--threads", threads_scan, "worker threads (default OPOCOMB_THREADS)");
    sc_scan->add_option("-o,--output", out_scan, "output path (default stdout)");
    sc_scan->callback([&] {
        run_vlf_scan(pf_scan, kind_scan, srange, nrange, j_scan, k_scan, threads_scan, out_scan);
    });

    // fig2
    auto* sc_f2 = app.add_subcommand("fig2", "pairwise squeezing and v1 variance vs sigma as CSV");
    ParamFlags pf_f2;
    pf_f2.attach(sc_f2);
    pf_f2.n = 3;
    std::string xpol = "sigma", srange_f2 = "1:3:200", out_f2;
    sc_f2->add_option("--x-policy", xpol, "how v1's x follows the scan (only: sigma)");
    sc_f2->add_option("--sigma-range", srange_f2, "a:b:steps");
    sc_f2->add_option("-o,--output", out_f2, "output path (default stdout)");
    sc_f2->callback([&] { run_fig2(pf_f2, xpol, srange_f2, out_f2); });

    // verify
    auto* sc_v = app.add_subcommand("verify", "Monte-Carlo check of a DC witness variance");
    ParamFlags pf_v;
    pf_v.attach(sc_v);
    std::string wit_v, out_v;
    int traj = 10000, threads_v = 0;
    unsigned long long seed = 1;
    double dt_v = 0.0, tt_v = 0.0, burn_v = 0.0, bw_v = 0.0;
    sc_v->add_option("--witness", wit_v, "witness spec")->required();
    sc_v->add_option("--traj", traj, "number of trajectories");
    sc_v->add_option("--seed", seed, "RNG seed");
    sc_v->add_option("--dt", dt_v, "integrator step (default 0.005/max rate)");
    sc_v->add_option("--t-total", tt_v, "total simulated time per trajectory");
    sc_v->add_option("--burn-in", burn_v, "discarded transient time");
    sc_v->add_option("--bandwidth", bw_v, "low-pass bandwidth (reciprocal analysis window)");
    sc_v->add_option("--threads", threads_v, "worker threads");
    sc_v->add_option("-o,--output", out_v, "output path (default stdout)");
    sc_v->callback([&] {
        run_verify(pf_v, wit_v, traj, seed, dt_v, tt_v, burn_v, bw_v, threads_v, out_v);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const opo::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "opo/witnesses.hpp"

using namespace opo;

static OpoParams make(int n, double sigma, double kappa = 1.0) {
    OpoParams p;
    p.k_p = kappa;
    p.n = n;
    p.sigma = sigma;
    return p;
}

TEST_CASE("kind names round trip") {
    for (VlfKind k : {VlfKind::S1, VlfKind::S2, VlfKind::S3, VlfKind::S4, VlfKind::S2prime})
        CHECK(vlf_kind_from_string(to_string(k)) == k);
    CHECK(vlf_kind_from_string("S2prime") == VlfKind::S2prime);
    CHECK_THROWS_AS(vlf_kind_from_string("S5"), std::invalid_argument);
    CHECK(kind_has_x(VlfKind::S1));
    CHECK(kind_has_x(VlfKind::S3));
    CHECK(!kind_has_x(VlfKind::S4));
    CHECK(!kind_has_x(VlfKind::S2prime));
}

TEST_CASE("separability bounds for the equal profile") {
    const OpoParams p2 = make(2, 2.0);
    const SteadyState s2 = steady_state(p2);
    CHECK(build_case(VlfKind::S1, p2, s2, 1, 1, 2.0).bound == doctest::Approx(16.0));
    CHECK(build_case(VlfKind::S2, p2, s2, 1, 1, 1.0).bound == doctest::Approx(8.0));
    CHECK(build_case(VlfKind::S2prime, p2, s2, 1, 1, 1.0).bound == doctest::Approx(8.0));
    CHECK(build_case(VlfKind::S4, p2, s2, 1, 1, 1.0).bound == doctest::Approx(4.0));

    const OpoParams p4 = make(4, 2.0);
    const SteadyState s4 = steady_state(p4);
    CHECK(build_case(VlfKind::S3, p4, s4, 1, 1, 1.0).bound == doctest::Approx(24.0));
    CHECK(build_case(VlfKind::S3, p4, s4, 1, 2, 1.0).bound == doctest::Approx(32.0));
    CHECK(build_case(VlfKind::S4, p4, s4, 1, 3, 1.0).bound == doctest::Approx(4.0));

    // the bound never depends on the free pump weight
    for (double x : {0.5, 1.0, 7.0}) {
        CHECK(build_case(VlfKind::S1, p2, s2, 1, 1, x).bound == doctest::Approx(16.0));
        CHECK(build_case(VlfKind::S2, p2, s2, 1, 1, x).bound == doctest::Approx(8.0));
    }
}

TEST_CASE("group split bounds interpolate between the pair split and the half split") {
    for (int n = 2; n <= 12; ++n) {
        const OpoParams p = make(n, 2.0);
        const SteadyState ss = steady_state(p);
        for (int k = 1; k < n; ++k) {
            const double b = build_case(VlfKind::S3, p, ss, 1, k, 1.0).bound;
            CHECK(b >= 8.0 * (n - 1) - 1e-9);
            CHECK(b <= 2.0 * n * n + 1e-9);
            CHECK(b == doctest::Approx(8.0 * k * (n - k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("uneven profile changes the pair split bound") {
    OpoParams p = make(2, 2.0);
    p.amplitude_profile = {2.0, 1.0};
    const SteadyState ss = steady_state(p);
    // ratios r = {1, 1/2}: both partition sums have magnitude 1
    CHECK(build_case(VlfKind::S2, p, ss, 1, 1, 1.0).bound == doctest::Approx(4.0));
}

TEST_CASE("witness channel weights for the pump-signal split") {
    const OpoParams p = make(2, 2.0);
    const SteadyState ss = steady_state(p);
    const VlfCase c = build_case(VlfKind::S1, p, ss, 1, 1, 2.0);
    CHECK(c.u.w[static_cast<size_t>(channel_index(Chan::Qplus, 1, 2))] == doctest::Approx(1.0));
    CHECK(c.u.w[static_cast<size_t>(channel_index(Chan::Qminus, 1, 2))] == doctest::Approx(0.0));
    CHECK(c.u.w[static_cast<size_t>(channel_index(Chan::Qpump, 0, 2))] == doctest::Approx(2.0));
    CHECK(c.v.w[static_cast<size_t>(channel_index(Chan::Pplus, 2, 2))] == doctest::Approx(1.0));
    CHECK(c.v.w[static_cast<size_t>(channel_index(Chan::Ppump, 0, 2))] == doctest::Approx(-2.0));
}

TEST_CASE("P side of the pair split is exactly noiseless at DC") {
    for (double sigma : {1.5, 2.0, 5.0}) {
        const OpoParams p = make(3, sigma);
        const SteadyState ss = steady_state(p);
        TransferCache cache(p, ss);
        const VlfCase c = build_case(VlfKind::S2, p, ss, 2, 1, 1.0);
        CHECK(std::abs(witness_variance_dc(c.v, cache)) < 1e-12);
    }
}

TEST_CASE("frozen variance of the pump-signal P combination") {
    const OpoParams p = make(2, 2.0);
    const SteadyState ss = steady_state(p);
    const VlfCase c = build_case(VlfKind::S1, p, ss, 1, 1, 2.0);
    CHECK(witness_variance_dc(c.v, p, ss) ==
          doctest::Approx(0.7024268660098018).epsilon(1e-10));
}

TEST_CASE("total pump-signal witness is a Laurent polynomial in x, degrees -2..2") {
    // u carries a pump weight proportional to 1/x and v one proportional to
    // x, so the two variances together span powers x^-2 .. x^2.  The odd
    // powers survive through the quadrature-pump cross covariances, so a
    // purely even fit does not reproduce S(x).  Fit all five coefficients on
    // five points and predict two more.
    const OpoParams p = make(3, 2.5);
    const SteadyState ss = steady_state(p);
    TransferCache cache(p, ss);
    const auto S = [&](double x) {
        return evaluate(build_case(VlfKind::S1, p, ss, 1, 1, x), cache).S;
    };
    const std::array<double, 5> xs{0.5, 1.0, 2.0, 4.0, 8.0};
    Eigen::Matrix<double, 5, 5> A;
    Eigen::Matrix<double, 5, 1> b;
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) A(r, c) = std::pow(xs[static_cast<size_t>(r)], c - 2);
        b(r) = S(xs[static_cast<size_t>(r)]);
    }
    const Eigen::Matrix<double, 5, 1> coef = A.partialPivLu().solve(b);
    const auto predict = [&](double x) {
        double acc = 0.0;
        for (int c = 0; c < 5; ++c) acc += coef(c) * std::pow(x, c - 2);
        return acc;
    };
    CHECK(S(3.0) == doctest::Approx(predict(3.0)).epsilon(1e-9));
    CHECK(S(6.0) == doctest::Approx(predict(6.0)).epsilon(1e-9));
    // both odd powers are genuinely present
    CHECK(std::abs(coef(1)) > 1.0);   // coefficient of 1/x
    CHECK(std::abs(coef(3)) > 0.1);   // coefficient of x
}

TEST_CASE("optimized pair split at the boundary power ratio") {
    const OpoParams p = make(2, 2.0);
    const SteadyState ss = steady_state(p);
    const auto [x_opt, res] = optimize_x(VlfKind::S2, p, ss);
    CHECK(x_opt == doctest::Approx(2.19736822693562).epsilon(1e-6));
    CHECK(res.S == doctest::Approx(8.0).epsilon(1e-8));
    CHECK(std::abs(res.violation) < 1e-7);
    CHECK(res.converged);
    CHECK(!res.boundary_pinned);

    // local optimality around the reported x
    TransferCache cache(p, ss);
    const auto S = [&](double x) {
        return evaluate(build_case(VlfKind::S2, p, ss, 1, 1, x), cache).S;
    };
    CHECK(S(0.9 * x_opt) >= res.S - 1e-12);
    CHECK(S(1.1 * x_opt) >= res.S - 1e-12);
}

TEST_CASE("pump-signal witness certifies inseparability at sigma = 2") {
    const OpoParams p = make(3, 2.0);
    const SteadyState ss = steady_state(p);
    const auto [x_opt, res] = optimize_x(VlfKind::S1, p, ss);
    CHECK(x_opt == doctest::Approx(2.5993298545408297).epsilon(1e-6));
    CHECK(res.S == doctest::Approx(13.198933731713408).epsilon(1e-8));
    CHECK(res.violation == doctest::Approx(-10.801066268286592).epsilon(1e-8));
    CHECK(res.violation < 0.0);
}

TEST_CASE("dropping the pump weight weakens the pair split witness") {
    const OpoParams p = make(2, 3.0);
    const SteadyState ss = steady_state(p);
    const VlfResult with_pump = optimize_x(VlfKind::S2, p, ss).second;
    CHECK(with_pump.violation < 0.0);
    const VlfResult without =
        evaluate(build_case(VlfKind::S2prime, p, ss, 1, 1, 1.0), p, ss);
    CHECK(without.violation > 0.0);
}

TEST_CASE("equal amplitudes make the distinguished pair irrelevant") {
    const OpoParams p = make(3, 2.0);
    const SteadyState ss = steady_state(p);
    TransferCache cache(p, ss);
    const VlfResult r1 = evaluate(build_case(VlfKind::S2, p, ss, 1, 1, 1.5), cache);
    const VlfResult r2 = evaluate(build_case(VlfKind::S2, p, ss, 2, 1, 1.5), cache);
    CHECK(r1.S == doctest::Approx(r2.S).epsilon(1e-10));
    CHECK(r1.bound == doctest::Approx(r2.bound).epsilon(1e-12));
}

TEST_CASE("bare mode split is violated whenever the comb oscillates") {
    for (int n : {2, 3}) {
        for (double sigma : {1.2, 3.0}) {
            const OpoParams p = make(n, sigma);
            const SteadyState ss = steady_state(p);
            for (int k = 1; k < n; ++k) {
                const VlfResult r = evaluate(build_case(VlfKind::S4, p, ss, 1, k, 1.0), p, ss);
                INFO("n=", n, " sigma=", sigma, " k=", k);
                CHECK(std::abs(r.S) < 1e-8);
                CHECK(r.violation == doctest::Approx(-4.0 * (n - k)).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("case validation") {
    const OpoParams p = make(2, 2.0);
    const SteadyState ss = steady_state(p);
    CHECK_THROWS_AS(build_case(VlfKind::S2, p, ss, 3, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_case(VlfKind::S3, p, ss, 1, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_case(VlfKind::S1, p, ss, 1, 1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(optimize_x(VlfKind::S4, p, ss), std::invalid_argument);
}

TEST_CASE("violation surface over the power grid") {
    const std::vector<double> sigmas{1.5, 2.0, 3.0};
    const std::vector<int> ns{2, 3};
    const OpoParams tmpl = make(2, 2.0);
    const SurfaceGrid g = scan_surface(VlfKind::S2, sigmas, ns, tmpl, 1, 1, 2);
    REQUIRE(g.violation.size() == 6);
    for (char v : g.valid) CHECK(v == 1);

    // n = 2 changes sign at sigma = 2, n = 3 already violates at 2.0 and 3.0
    CHECK(g.violation[g.cell(0, 0)] > 0.0);
    CHECK(std::abs(g.violation[g.cell(0, 1)]) < 1e-6);
    CHECK(g.violation[g.cell(0, 2)] < 0.0);
    CHECK(g.violation[g.cell(1, 0)] > 0.0);
    CHECK(g.violation[g.cell(1, 1)] < 0.0);
    CHECK(g.violation[g.cell(1, 2)] < 0.0);

    for (size_t c = 0; c < 6; ++c) {
        CHECK(std::isfinite(g.x_opt[c]));
        CHECK(g.x_opt[c] > 0.0);
        CHECK(g.S[c] == doctest::Approx(g.violation[c] + g.bound[c]).epsilon(1e-12));
    }

    // the surface is deterministic regardless of the thread split
    const SurfaceGrid h = scan_surface(VlfKind::S2, sigmas, ns, tmpl, 1, 1, 1);
    for (size_t c = 0; c < 6; ++c) CHECK(g.violation[c] == h.violation[c]);
}

TEST_CASE("thread count resolution") {
    CHECK(resolve_thread_count(3) == 3);
    CHECK(resolve_thread_count(0) >= 1);
}

#include "drawdown/solver.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "drawdown/policy.hpp"

using namespace drawdown;

namespace {

const MarketParams kDefault{0.02, 0.06, 0.20, 0.04, 0.04, 0.8};
const MarketParams kAlt{0.03, 0.10, 0.30, 0.05, 0.02, 0.5};

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1.0});
}

// test-side oracle: textbook quadratic formula on the raw coefficients
void oracle_gammas(const MarketParams& p, double& g1, double& g2) {
    const double delta = 0.5 * ((p.mu - p.r) / p.sigma) * ((p.mu - p.r) / p.sigma);
    const double s = p.r - p.kappa - p.lam + delta;
    const double sq = std::sqrt(s * s + 4.0 * p.lam * delta);
    g1 = (s + sq) / (2.0 * delta);
    g2 = (s - sq) / (2.0 * delta);
}

// test-side oracle: plain midpoint bisection for the boundary-ratio root
double oracle_y1alpha(double g1, double g2, double alpha) {
    auto f = [&](double x) {
        return (1.0 - g2) / (g1 - g2) * std::pow(x, 1.0 - g1) -
               (1.0 - g1) / (g1 - g2) * std::pow(x, 1.0 - g2) - alpha;
    };
    double lo = 1e-12, hi = 1.0 - 1e-12;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// test-side oracle: bisection on the dual slope for the band inverse
double oracle_invert(const DualFunction& d, double z) {
    double lo = d.boundaries().y1, hi = d.boundaries().yalpha;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (d.band_slope(mid) > z) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("gamma roots: frozen values and closed forms") {
    const GammaRoots g = compute_gammas(kDefault);
    CHECK(g.delta == doctest::Approx(0.02).epsilon(1e-12));
    // for these parameters the quadratic reduces to g^2 + 2g - 2 = 0
    CHECK(rel_close(g.gamma1, std::sqrt(3.0) - 1.0, 1e-14));
    CHECK(rel_close(g.gamma2, -std::sqrt(3.0) - 1.0, 1e-14));
    CHECK(rel_close(g.gamma1, 0.73205080756887728, 1e-13));
    CHECK(rel_close(g.gamma2, -2.7320508075688781, 1e-13));

    const GammaRoots a = compute_gammas(kAlt);
    CHECK(rel_close(a.delta, 0.027222222222222229, 1e-14));
    CHECK(rel_close(a.gamma1, 0.65399903550216341, 1e-13));
    CHECK(rel_close(a.gamma2, -1.1233867906042040, 1e-13));
}

TEST_CASE("gamma roots: identities over random valid parameter sets") {
    std::mt19937_64 gen(20260809);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        MarketParams p{};
        p.r = 0.001 + 0.079 * u01(gen);
        p.mu = p.r + 0.005 + 0.12 * u01(gen);
        p.sigma = 0.05 + 0.55 * u01(gen);
        p.kappa = p.r + 0.005 + 0.12 * u01(gen);
        p.lam = 0.005 + 0.195 * u01(gen);
        p.alpha = 0.05 + 0.9 * u01(gen);
        validate(p);
        const GammaRoots g = compute_gammas(p);
        CHECK(g.gamma1 > 0.0);
        CHECK(g.gamma1 < 1.0);
        CHECK(g.gamma2 < 0.0);
        // Vieta, relative to the target values
        CHECK(rel_close(g.gamma1 * g.gamma2, -p.lam / g.delta, 1e-12));
        CHECK(rel_close(g.gamma1 + g.gamma2, (p.r - p.kappa - p.lam + g.delta) / g.delta, 1e-12));
        // product of (1 - gamma) factors collapses to (kappa - r)/delta
        CHECK(rel_close((1.0 - g.gamma1) * (1.0 - g.gamma2), (p.kappa - p.r) / g.delta, 1e-11));
        // independent route
        double o1 = 0.0, o2 = 0.0;
        oracle_gammas(p, o1, o2);
        CHECK(rel_close(g.gamma1, o1, 1e-12));
        CHECK(rel_close(g.gamma2, o2, 1e-12));
    }
}

TEST_CASE("boundary ratio: frozen values and bisection oracle") {
    const GammaRoots g = compute_gammas(kDefault);
    const double x = solve_y1alpha(g, kDefault.alpha);
    CHECK(rel_close(x, 0.33120964371501143, 1e-12));
    CHECK(rel_close(x, oracle_y1alpha(g.gamma1, g.gamma2, 0.8), 1e-11));

    const GammaRoots ga = compute_gammas(kAlt);
    const double xa = solve_y1alpha(ga, kAlt.alpha);
    CHECK(rel_close(xa, 0.081109497269738201, 1e-12));
    CHECK(rel_close(xa, oracle_y1alpha(ga.gamma1, ga.gamma2, 0.5), 1e-11));
}

TEST_CASE("boundary ratio: limiting behavior in alpha") {
    const GammaRoots g = compute_gammas(kDefault);
    // the left side is tangent to 1 at x = 1, so 1 - x ~ sqrt(2(1-alpha))
    CHECK(solve_y1alpha(g, 0.999) > 0.95);
    CHECK(solve_y1alpha(g, 1.0 - 1e-8) > 0.999);
    CHECK(solve_y1alpha(g, 0.001) < 0.01);
    // monotone in alpha
    double prev = 0.0;
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double x = solve_y1alpha(g, a);
        CHECK(x > prev);
        prev = x;
    }
}

TEST_CASE("boundary ratio: corrupted roots are rejected, not mis-solved") {
    const GammaRoots bad{0.02, 1.5, -2.0};  // gamma1 out of (0,1)
    CHECK_THROWS(solve_y1alpha(bad, 0.8));
}

TEST_CASE("free boundaries: frozen values, ordering, continuity") {
    const DualFunction d(kDefault);
    const auto& fb = d.boundaries();
    CHECK(rel_close(fb.yalpha, 18.014013235734126, 1e-12));
    CHECK(rel_close(fb.y1, 5.9664149056849999, 1e-12));
    CHECK(fb.yalpha > 0.0);
    CHECK(fb.y1 > 0.0);
    CHECK(fb.y1 < fb.yalpha);
    CHECK(std::abs(d.continuity_gap()) / std::abs(d.tail_value(fb.yalpha)) < 1e-13);

    const DualFunction a(kAlt);
    CHECK(rel_close(a.boundaries().yalpha, 41.258131376454741, 1e-12));
    CHECK(rel_close(a.boundaries().y1, 3.3464262942330558, 1e-12));
    CHECK(std::abs(a.continuity_gap()) / std::abs(a.tail_value(a.boundaries().yalpha)) < 1e-13);
}

TEST_CASE("smooth fit at both free boundaries") {
    for (const auto& p : {kDefault, kAlt}) {
        const DualFunction d(p);
        const auto& fb = d.boundaries();
        CHECK(std::abs(d.zeta_hat_y(fb.y1) - 1.0) < 1e-12);
        CHECK(std::abs(d.zeta_hat_yy(fb.y1)) < 1e-12);
        CHECK(std::abs(d.zeta_hat_y(fb.yalpha) - p.alpha) < 1e-12);   // tail side
        CHECK(std::abs(d.band_slope(fb.yalpha) - p.alpha) < 1e-12);   // band side
    }
}

TEST_CASE("tail branch closed form and limit at infinity") {
    const DualFunction d(kDefault);
    const double yal = d.boundaries().yalpha;
    CHECK(rel_close(d.zeta_hat(10.0 * yal), 24.990224006923417, 1e-12));
    CHECK(rel_close(d.zeta_hat(yal), 19.725130825289756, 1e-12));
    const double inv_lam = 1.0 / kDefault.lam;
    CHECK(d.zeta_hat(std::numeric_limits<double>::infinity()) == inv_lam);
    CHECK(std::abs(d.zeta_hat(1e9 * yal) - inv_lam) < 1e-12 * inv_lam);
    CHECK(d.zeta_hat(1e3 * yal) < inv_lam);  // approaches from below
}

TEST_CASE("dual inversion: endpoints, frozen value, oracle, round trip") {
    const DualFunction d(kDefault);
    const auto& fb = d.boundaries();
    CHECK(d.invert_dual(1.0) == fb.y1);
    CHECK(d.invert_dual(kDefault.alpha) == fb.yalpha);
    CHECK(std::isinf(d.invert_dual(0.0)));

    const double y = d.invert_dual(0.9);
    CHECK(rel_close(y, 11.339933684204406, 1e-12));
    CHECK(rel_close(y, oracle_invert(d, 0.9), 1e-10));

    for (const auto& p : {kDefault, kAlt}) {
        const DualFunction dd(p);
        for (int i = 0; i <= 200; ++i) {
            const double z = static_cast<double>(i) / 200.0;
            const double yy = dd.invert_dual(z);
            CHECK(yy >= dd.boundaries().y1);
            CHECK(std::abs(dd.zeta_hat_y(yy) - z) < 1e-10);
        }
    }
}

TEST_CASE("dual ODE residual on a log grid") {
    for (const auto& p : {kDefault, kAlt}) {
        const DualFunction d(p);
        const auto& fb = d.boundaries();
        const GammaRoots g = d.roots();
        const double ylo = fb.y1 * (1.0 + 1e-6);
        const double yhi = 50.0 * fb.yalpha;
        double worst = 0.0;
        for (int i = 0; i < 500; ++i) {
            const double y = ylo * std::pow(yhi / ylo, i / 499.0);
            if (std::abs(y - fb.yalpha) <= 1e-4 * fb.yalpha) continue;
            const double ind = y >= fb.yalpha ? 1.0 : 0.0;
            const double res = p.lam * d.zeta_hat(y) +
                               (p.r - p.kappa - p.lam) * y * d.zeta_hat_y(y) -
                               g.delta * y * y * d.zeta_hat_yy(y) - ind;
            worst = std::max(worst, std::abs(res));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("monotone increasing, strictly concave away from y1") {
    for (const auto& p : {kDefault, kAlt}) {
        const DualFunction d(p);
        const auto& fb = d.boundaries();
        for (int i = 1; i <= 300; ++i) {
            const double y = fb.y1 * (1.0 + 1e-4) * std::pow(100.0, i / 300.0);
            if (std::abs(y - fb.yalpha) <= 1e-9 * fb.yalpha) continue;
            CHECK(d.zeta_hat_y(y) > 0.0);
            CHECK(d.zeta_hat_yy(y) < 0.0);
        }
    }
}

TEST_CASE("analytic derivatives match centered differences") {
    const DualFunction d(kDefault);
    const auto& fb = d.boundaries();
    for (double y : {fb.y1 * 1.3, 0.5 * (fb.y1 + fb.yalpha), fb.yalpha * 0.99,
                     fb.yalpha * 1.5, fb.yalpha * 7.0}) {
        const double h = 1e-6 * y;
        const double fd1 = (d.zeta_hat(y + h) - d.zeta_hat(y - h)) / (2.0 * h);
        CHECK(rel_close(fd1, d.zeta_hat_y(y), 1e-6));
        const double fd2 = (d.zeta_hat_y(y + h) - d.zeta_hat_y(y - h)) / (2.0 * h);
        CHECK(rel_close(fd2, d.zeta_hat_yy(y), 1e-6));
    }
}

TEST_CASE("C1 at yalpha, with a genuine jump in the second derivative") {
    for (const auto& p : {kDefault, kAlt}) {
        const DualFunction d(p);
        const double yal = d.boundaries().yalpha;
        CHECK(rel_close(d.band_value(yal), d.tail_value(yal), 1e-10));
        CHECK(rel_close(d.band_slope(yal), d.tail_slope(yal), 1e-10));
        const double left = d.band_curvature(yal);
        const double right = d.tail_curvature(yal);
        CHECK(left < 0.0);
        CHECK(right < 0.0);
        CHECK(std::isfinite(left));
        CHECK(std::isfinite(right));
        CHECK(std::abs(left - right) > 1e-6 * std::abs(right));
    }
}

TEST_CASE("domain guards") {
    const DualFunction d(kDefault);
    CHECK_THROWS_AS(d.zeta_hat(d.boundaries().y1 * (1.0 - 1e-6)), std::domain_error);
    CHECK_THROWS_AS(d.zeta_hat_y(0.0), std::domain_error);
    CHECK_THROWS_AS(d.invert_dual(-0.1), std::domain_error);
    CHECK_THROWS_AS(d.invert_dual(1.0 + 1e-12), std::domain_error);
    CHECK_NOTHROW(d.zeta_hat(d.boundaries().y1));
}

TEST_CASE("full pipeline holds across random moderate parameter sets") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int done = 0;
    while (done < 25) {
        MarketParams p{};
        p.r = 0.005 + 0.05 * u01(gen);
        p.mu = p.r + 0.01 + 0.07 * u01(gen);
        p.sigma = 0.1 + 0.4 * u01(gen);
        p.kappa = p.r + 0.01 + 0.09 * u01(gen);
        p.lam = 0.01 + 0.14 * u01(gen);
        p.alpha = 0.1 + 0.8 * u01(gen);
        validate(p);
        const GammaRoots g = compute_gammas(p);
        // skip corners where the boundary ratio underflows representability
        const double a_coef = (1.0 - g.gamma2) / (g.gamma1 - g.gamma2);
        if (std::log(p.alpha / a_coef) / (1.0 - g.gamma1) < std::log(1e-10)) continue;
        ++done;
        const DualFunction d(p);
        const auto& fb = d.boundaries();
        CHECK(fb.y1 > 0.0);
        CHECK(fb.y1 < fb.yalpha);
        CHECK(std::abs(d.continuity_gap()) < 1e-10 * std::abs(d.tail_value(fb.yalpha)));
        CHECK(std::abs(d.zeta_hat_y(fb.y1) - 1.0) < 1e-11);
        for (double z : {0.05, 0.3, p.alpha, 0.95, 1.0}) {
            CHECK(std::abs(d.zeta_hat_y(d.invert_dual(z)) - z) < 1e-10);
        }
    }
}

TEST_CASE("diagnostics dump carries the defining residuals") {
    const DualFunction d(kDefault);
    const auto diag = d.diagnostics();
    CHECK(diag.at("gamma1").get<double>() == d.roots().gamma1);
    CHECK(std::abs(diag.at("y1alpha_residual").get<double>()) < 1e-12);
    CHECK(std::abs(diag.at("continuity_gap").get<double>()) < 1e-9);
    CHECK(std::abs(diag.at("curvature_at_y1").get<double>()) < 1e-12);
}

#include "drawdown/solver.hpp"

#include <cmath>
#include <limits>

#include "drawdown/root_finding.hpp"

namespace drawdown {

GammaRoots compute_gammas(const MarketParams& p) {
    const double delta = p.delta();
    const double s = p.r - p.kappa - p.lam + delta;
    const double disc = s * s + 4.0 * p.lam * delta;
    const double sq = std::sqrt(disc);
    // stable quadratic: no cancellation in either root
    const double q = 0.5 * (s + std::copysign(sq, s));
    const double root_a = q / delta;
    const double root_b = -p.lam / q;
    GammaRoots out{delta, 0.0, 0.0};
    out.gamma1 = std::fmax(root_a, root_b);
    out.gamma2 = std::fmin(root_a, root_b);
    if (!(out.gamma1 > 0.0 && out.gamma1 < 1.0) || !(out.gamma2 < 0.0)) {
        throw NumericalError("gamma roots escaped their sign ranges");
    }
    return out;
}

double solve_y1alpha(const GammaRoots& roots, double alpha) {
    const double g1 = roots.gamma1, g2 = roots.gamma2;
    const double a = (1.0 - g2) / (g1 - g2);
    const double b = (1.0 - g1) / (g1 - g2);
    // residual of the boundary-ratio equation at x = exp(l)
    auto h = [&](double l) {
        return a * std::exp((1.0 - g1) * l) - b * std::exp((1.0 - g2) * l) - alpha;
    };
    // a*x^(1-g1) alone already exceeds alpha at the root, so
    // l_lo = log(alpha/a)/(1-g1) brackets from below; h(0) = 1 - alpha > 0.
    const double l_lo = std::log(alpha / a) / (1.0 - g1);
    RootResult res = solve_bracketed(h, l_lo, 0.0);
    if (std::abs(res.fx) > 1e-12) {
        throw NumericalError("boundary-ratio solve did not reach tolerance");
    }
    if (res.x < std::log(1e-14)) {
        throw NumericalError("boundary ratio y1/yalpha underflows the 1e-14 guard");
    }
    return std::exp(res.x);
}

FreeBoundaries compute_boundaries(const GammaRoots& roots, double y1alpha,
                                  const MarketParams& p) {
    const double g1 = roots.gamma1, g2 = roots.gamma2;
    if (!(y1alpha >= 1e-14 && y1alpha < 1.0)) {
        throw NumericalError("y1alpha outside [1e-14, 1)");
    }
    const double lx = std::log(y1alpha);
    const double t1 = (1.0 - g2) / (g1 * (g1 - g2)) * std::exp((1.0 - g1) * lx);
    const double t2 = -(1.0 - g1) / (g2 * (g1 - g2)) * std::exp((1.0 - g2) * lx);
    const double t3 = -p.alpha / g2;
    // t2 may underflow to 0 when (1-g2)*log(x) is very negative; that term
    // is positive analytically and negligible in the sum
    if (!(t1 > 0.0 && t2 >= 0.0 && t3 > 0.0)) {
        throw NumericalError("continuity terms for yalpha are not all positive");
    }
    FreeBoundaries fb{};
    fb.y1alpha = y1alpha;
    fb.yalpha = 1.0 / (p.lam * (t1 + t2 + t3));
    fb.y1 = fb.yalpha * y1alpha;
    return fb;
}

DualFunction::DualFunction(const MarketParams& p)
    : DualFunction(p, compute_gammas(p),
                   compute_boundaries(compute_gammas(p),
                                      solve_y1alpha(compute_gammas(p), p.alpha), p)) {}

DualFunction::DualFunction(const MarketParams& p, const GammaRoots& roots,
                           const FreeBoundaries& fb)
    : params_(p), roots_(roots), fb_(fb) {
    const double g1 = roots_.gamma1, g2 = roots_.gamma2;
    cb1_ = fb_.y1 * (1.0 - g2) / (g1 * (g1 - g2));
    cb2_ = -fb_.y1 * (1.0 - g1) / (g2 * (g1 - g2));
    ca_ = (1.0 - g2) / (g1 - g2);
    cbn_ = (1.0 - g1) / (g1 - g2);
    ccurv_ = (1.0 - g1) * (1.0 - g2) / (g1 - g2);
    ct_ = params_.alpha * fb_.yalpha / g2;
    inv_lam_ = 1.0 / params_.lam;
    log_inv_ratio_ = -std::log(fb_.y1alpha);
}

double DualFunction::band_value(double y) const {
    const double l = std::log(y / fb_.y1);
    return cb1_ * std::exp(roots_.gamma1 * l) + cb2_ * std::exp(roots_.gamma2 * l);
}

double DualFunction::band_slope(double y) const {
    const double l = std::log(y / fb_.y1);
    return ca_ * std::exp((roots_.gamma1 - 1.0) * l) - cbn_ * std::exp((roots_.gamma2 - 1.0) * l);
}

double DualFunction::band_curvature(double y) const {
    const double l = std::log(y / fb_.y1);
    return -ccurv_ / fb_.y1 *
           (std::exp((roots_.gamma1 - 2.0) * l) - std::exp((roots_.gamma2 - 2.0) * l));
}

double DualFunction::tail_value(double y) const {
    return inv_lam_ + ct_ * std::pow(y / fb_.yalpha, roots_.gamma2);
}

double DualFunction::tail_slope(double y) const {
    return params_.alpha * std::pow(y / fb_.yalpha, roots_.gamma2 - 1.0);
}

double DualFunction::tail_curvature(double y) const {
    return -params_.alpha * (1.0 - roots_.gamma2) / fb_.yalpha *
           std::pow(y / fb_.yalpha, roots_.gamma2 - 2.0);
}

namespace {

inline void check_domain(double y, double y1) {
    if (!(y >= y1 * (1.0 - 1e-12))) {
        throw std::domain_error("zeta_hat: y below the lower free boundary y1");
    }
}

}  // namespace

double DualFunction::zeta_hat(double y) const {
    check_domain(y, fb_.y1);
    if (y == std::numeric_limits<double>::infinity()) return inv_lam_;
    return y >= fb_.yalpha ? tail_value(y) : band_value(y);
}

double DualFunction::zeta_hat_y(double y) const {
    check_domain(y, fb_.y1);
    if (y == std::numeric_limits<double>::infinity()) return 0.0;
    return y >= fb_.yalpha ? tail_slope(y) : band_slope(y);
}

double DualFunction::zeta_hat_yy(double y) const {
    check_domain(y, fb_.y1);
    if (y == std::numeric_limits<double>::infinity()) return 0.0;
    return y >= fb_.yalpha ? tail_curvature(y) : band_curvature(y);
}

double DualFunction::continuity_gap() const {
    return band_value(fb_.yalpha) - tail_value(fb_.yalpha);
}

double DualFunction::invert_dual(double z) const {
    if (!(z >= 0.0 && z <= 1.0)) {
        throw std::domain_error("invert_dual: z outside [0, 1]");
    }
    if (z == 0.0) return std::numeric_limits<double>::infinity();
    const double alpha = params_.alpha;
    if (z <= alpha) {
        return fb_.yalpha * std::pow(z / alpha, 1.0 / (roots_.gamma2 - 1.0));
    }
    const double g1 = roots_.gamma1, g2 = roots_.gamma2;
    // band slope in s = log(y/y1); decreasing from 1 at s=0 to alpha
    auto g = [&](double s) {
        return ca_ * std::exp((g1 - 1.0) * s) - cbn_ * std::exp((g2 - 1.0) * s) - z;
    };
    RootResult res = solve_bracketed(g, 0.0, log_inv_ratio_);
    return fb_.y1 * std::exp(res.x);
}

nlohmann::json DualFunction::diagnostics() const {
    const double g1 = roots_.gamma1, g2 = roots_.gamma2;
    const double x = fb_.y1alpha;
    const double ratio_residual = ca_ * std::pow(x, 1.0 - g1) - cbn_ * std::pow(x, 1.0 - g2) - params_.alpha;
    return nlohmann::json{
        {"delta", roots_.delta},
        {"gamma1", g1},
        {"gamma2", g2},
        {"y1alpha", fb_.y1alpha},
        {"yalpha", fb_.yalpha},
        {"y1", fb_.y1},
        {"y1alpha_residual", ratio_residual},
        {"continuity_gap", continuity_gap()},
        {"slope_at_y1_minus_1", band_slope(fb_.y1) - 1.0},
        {"curvature_at_y1", band_curvature(fb_.y1)},
        {"slope_at_yalpha_minus_alpha", band_slope(fb_.yalpha) - params_.alpha},
    };
}

}  // namespace drawdown

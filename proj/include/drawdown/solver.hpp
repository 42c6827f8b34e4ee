#pragma once

#include <stdexcept>

#include "drawdown/params.hpp"
#include "json.hpp"

namespace drawdown {

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// delta and the roots of  delta*g^2 - (r - kappa - lam + delta)*g - lam = 0.
// gamma1 lies in (0,1), gamma2 is negative; both are dimensionless.
struct GammaRoots {
    double delta;
    double gamma1;
    double gamma2;
};

GammaRoots compute_gammas(const MarketParams& p);

// Unique x in (0,1) with
//   (1-g2)/(g1-g2) * x^(1-g1) - (1-g1)/(g1-g2) * x^(1-g2) = alpha.
// The left side increases from 0 to 1 on (0,1), so the root is bracketed.
// Solved in log space; throws NumericalError if the root underflows the
// 1e-14 guard (pathologically extreme parameters).
double solve_y1alpha(const GammaRoots& roots, double alpha);

struct FreeBoundaries {
    double y1alpha;  // ratio y1 / yalpha, in (0,1)
    double yalpha;   // upper free boundary, > 0
    double y1;       // lower free boundary, = yalpha * y1alpha
};

// yalpha from the continuity of the dual solution at yalpha:
//   yalpha = 1 / ( lam * [ (1-g2)/(g1(g1-g2)) x^(1-g1)
//                        - (1-g1)/(g2(g1-g2)) x^(1-g2) - alpha/g2 ] ),
// with x = y1alpha. All three bracketed terms are positive; this is
// checked at runtime.
FreeBoundaries compute_boundaries(const GammaRoots& roots, double y1alpha,
                                  const MarketParams& p);

// The fully determined concave dual solution zh on [y1, inf):
//
//   band, y1 <= y < yalpha:
//     zh(y) = y1/(g1-g2) [ (1-g2)/g1 (y/y1)^g1 - (1-g1)/g2 (y/y1)^g2 ]
//   tail, y >= yalpha:
//     zh(y) = 1/lam + alpha*yalpha/g2 (y/yalpha)^g2
//
// zh is increasing, concave, C1 everywhere and C2 except at yalpha, with
// zh_y(y1) = 1, zh_yy(y1) = 0, zh_y(yalpha) = alpha, zh(inf) = 1/lam.
// Immutable after construction; evaluations are pure.
class DualFunction {
public:
    explicit DualFunction(const MarketParams& p);

    // assemble from externally supplied pieces (perturbation experiments)
    DualFunction(const MarketParams& p, const GammaRoots& roots,
                 const FreeBoundaries& fb);

    const MarketParams& params() const { return params_; }
    const GammaRoots& roots() const { return roots_; }
    const FreeBoundaries& boundaries() const { return fb_; }

    // piecewise evaluation, tail branch at y == yalpha; domain y >= y1
    double zeta_hat(double y) const;
    double zeta_hat_y(double y) const;
    double zeta_hat_yy(double y) const;

    // single-branch closed forms, no domain restriction beyond y > 0
    double band_value(double y) const;
    double band_slope(double y) const;
    double band_curvature(double y) const;
    double tail_value(double y) const;
    double tail_slope(double y) const;
    double tail_curvature(double y) const;

    // band_value(yalpha) - tail_value(yalpha); identically 0 for boundaries
    // built by compute_boundaries, up to roundoff
    double continuity_gap() const;

    // Inverse of zh_y on [y1, inf): the unique y with zh_y(y) = z.
    //   z in (0, alpha]: closed form  yalpha * (z/alpha)^(1/(g2-1))
    //   z in (alpha, 1]: root of the band slope equation in [y1, yalpha]
    //   z == 0: +infinity (slope vanishes only in the limit)
    // Throws std::domain_error for z outside [0, 1].
    double invert_dual(double z) const;

    // roots, boundaries and defining residuals, for the CLI dump
    nlohmann::json diagnostics() const;

private:
    MarketParams params_;
    GammaRoots roots_;
    FreeBoundaries fb_;
    // cached coefficients
    double cb1_, cb2_;       // band value terms
    double ca_, cbn_;        // band slope terms A, B
    double ccurv_;           // band curvature factor (1-g1)(1-g2)/(g1-g2)
    double ct_;              // tail value coefficient alpha*yalpha/g2
    double inv_lam_;
    double log_inv_ratio_;   // log(1/y1alpha), band solve range
};

}  // namespace drawdown

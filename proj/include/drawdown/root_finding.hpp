#pragma once

#include <cmath>
#include <stdexcept>

namespace drawdown {

class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RootResult {
    double x;
    double fx;
    int iterations;
};

// Bracketed solve: bisection with a safeguarded secant refinement.
// Stops at |f| < f_tol or bracket width < x_tol_rel * scale, capped at
// max_iter. Requires f(lo) and f(hi) to straddle zero (an endpoint root
// is returned directly).
template <class F>
RootResult solve_bracketed(F&& f, double lo, double hi, double f_tol = 1e-13,
                           double x_tol_rel = 1e-15, int max_iter = 200) {
    double flo = f(lo);
    if (std::abs(flo) <= f_tol) return {lo, flo, 0};
    double fhi = f(hi);
    if (std::abs(fhi) <= f_tol) return {hi, fhi, 0};
    if (std::isnan(flo) || std::isnan(fhi) || (flo > 0.0) == (fhi > 0.0)) {
        throw BracketError("solve_bracketed: root not bracketed");
    }
    const double scale = std::fmax(std::fmax(std::abs(lo), std::abs(hi)), 1.0);
    double x = lo, fx = flo;
    for (int it = 1; it <= max_iter; ++it) {
        const double width = hi - lo;
        // secant from the current bracket endpoints, safeguarded to stay inside
        double cand = lo - flo * width / (fhi - flo);
        const double margin = 0.01 * width;
        if (!(cand > lo + margin && cand < hi - margin)) cand = lo + 0.5 * width;
        x = cand;
        fx = f(x);
        if (std::abs(fx) <= f_tol) return {x, fx, it};
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (hi - lo < x_tol_rel * scale) break;
    }
    // return the endpoint with the smaller residual
    if (std::abs(flo) < std::abs(fx)) { x = lo; fx = flo; }
    if (std::abs(fhi) < std::abs(fx)) { x = hi; fx = fhi; }
    return {x, fx, max_iter};
}

}  // namespace drawdown

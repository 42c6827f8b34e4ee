#pragma once

#include <string>

#include "drawdown/solver.hpp"

namespace drawdown {

struct PortfolioState {
    double w = 0.0;  // current wealth, 0 <= w <= m
    double m = 1.0;  // running maximum wealth, > 0
    double x = 0.0;  // drawdown time already accumulated, >= 0
};

// throws std::domain_error unless 0 <= w <= m, m > 0, x >= 0
void check_state(const PortfolioState& s);

// Minimum expected lifetime in drawdown, psi(w, m, x) = x + zeta(w/m).
double value(const DualFunction& d, const PortfolioState& s);

// zeta(z) for z = w/m in [0, 1]:
//   z <= alpha: 1/lam + (1-g2)/g2 * alpha*yalpha * (z/alpha)^(-g2/(1-g2))
//   z >  alpha: y1 (1-g1)(1-g2)/(g1-g2) [ yh^g1/g1 - yh^g2/g2 ],
//               yh = invert_dual(z)/y1
double zeta(const DualFunction& d, double z);

// Optimal dollar amount in the risky asset:
//   w <  alpha*m: (mu-r)/sigma^2 (1-g2) w
//   w >= alpha*m: (mu-r)/sigma^2 m (1-g1)(1-g2)/(g1-g2) [yh^(g1-1) - yh^(g2-1)]
// The policy jumps downward at w = alpha*m; at the boundary itself this
// returns the right (above-boundary) limit, matching the tail-branch rule
// of the dual solution. Domain: 0 < w <= m.
double policy_optimal(const DualFunction& d, double w, double m);
double policy_optimal_left_limit(const DualFunction& d, double m);
double policy_optimal_right_limit(const DualFunction& d, double m);

// Ruin-probability minimizer: (mu-r)/sigma^2 (1-g1) w, any w > 0.
double policy_ruin(const MarketParams& p, const GammaRoots& roots, double w);

// Drawdown-probability minimizer; defined only above the boundary,
// where it coincides with policy_optimal. Domain: alpha*m < w <= m.
double policy_drawdown_prob(const DualFunction& d, double w, double m);

// Occupation-time minimizer for the fixed interval [0, alpha*fixed_m]:
// slope (1-g2) below the ceiling, (1-g1) above, times (mu-r)/sigma^2 w.
// The ceiling itself counts as inside the interval. Domain: w > 0.
double policy_occupation(const MarketParams& p, const GammaRoots& roots, double w,
                         double fixed_m);

struct StrategyKind {
    enum class Family {
        OptimalDrawdownTime,
        RuinMin,
        DrawdownProbMin,
        OccupationMin,      // param = fixed interval ceiling m
        ConstantFraction,   // param = theta, invests theta*w
    };

    Family family = Family::OptimalDrawdownTime;
    double param = 0.0;

    static StrategyKind optimal() { return {Family::OptimalDrawdownTime, 0.0}; }
    static StrategyKind ruin() { return {Family::RuinMin, 0.0}; }
    static StrategyKind drawdown_prob() { return {Family::DrawdownProbMin, 0.0}; }
    static StrategyKind occupation(double fixed_m) { return {Family::OccupationMin, fixed_m}; }
    static StrategyKind constant_fraction(double theta) { return {Family::ConstantFraction, theta}; }
};

std::string to_string(const StrategyKind& k);

// "optimal" | "ruin" | "ddprob" | "occupation" | "const:<theta>";
// occupation takes its ceiling from fallback_m.
StrategyKind parse_strategy(const std::string& text, double fallback_m);

double policy_dispatch(const StrategyKind& kind, const DualFunction& d, double w, double m);

}  // namespace drawdown

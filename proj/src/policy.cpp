#include "drawdown/policy.hpp"

#include <cmath>

namespace drawdown {

void check_state(const PortfolioState& s) {
    if (!(s.m > 0.0) || !(s.w >= 0.0) || !(s.w <= s.m) || !(s.x >= 0.0)) {
        throw std::domain_error("portfolio state requires 0 <= w <= m, m > 0, x >= 0");
    }
}

double zeta(const DualFunction& d, double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("zeta: z outside [0, 1]");
    const auto& r = d.roots();
    const auto& fb = d.boundaries();
    const double alpha = d.params().alpha;
    if (z <= alpha) {
        const double g2 = r.gamma2;
        return 1.0 / d.params().lam +
               (1.0 - g2) / g2 * alpha * fb.yalpha *
                   std::pow(z / alpha, -g2 / (1.0 - g2));
    }
    const double g1 = r.gamma1, g2 = r.gamma2;
    const double yh = d.invert_dual(z) / fb.y1;
    const double lg = std::log(yh);
    return fb.y1 * (1.0 - g1) * (1.0 - g2) / (g1 - g2) *
           (std::exp(g1 * lg) / g1 - std::exp(g2 * lg) / g2);
}

double value(const DualFunction& d, const PortfolioState& s) {
    check_state(s);
    return s.x + zeta(d, s.w / s.m);
}

namespace {

// bracket of the above-boundary policy at yh = y/y1
inline double band_policy_bracket(const DualFunction& d, double yh) {
    const double g1 = d.roots().gamma1, g2 = d.roots().gamma2;
    const double lg = std::log(yh);
    return (1.0 - g1) * (1.0 - g2) / (g1 - g2) *
           (std::exp((g1 - 1.0) * lg) - std::exp((g2 - 1.0) * lg));
}

}  // namespace

double policy_optimal(const DualFunction& d, double w, double m) {
    if (!(m > 0.0) || !(w > 0.0) || !(w <= m)) {
        throw std::domain_error("policy_optimal: require 0 < w <= m");
    }
    const double coeff = d.params().risk_coeff();
    if (w < d.params().alpha * m) {
        return coeff * (1.0 - d.roots().gamma2) * w;
    }
    const double yh = d.invert_dual(w / m) / d.boundaries().y1;
    return coeff * m * band_policy_bracket(d, yh);
}

double policy_optimal_left_limit(const DualFunction& d, double m) {
    return d.params().risk_coeff() * (1.0 - d.roots().gamma2) * d.params().alpha * m;
}

double policy_optimal_right_limit(const DualFunction& d, double m) {
    return d.params().risk_coeff() * m *
           band_policy_bracket(d, 1.0 / d.boundaries().y1alpha);
}

double policy_ruin(const MarketParams& p, const GammaRoots& roots, double w) {
    if (!(w > 0.0)) throw std::domain_error("policy_ruin: require w > 0");
    return p.risk_coeff() * (1.0 - roots.gamma1) * w;
}

double policy_drawdown_prob(const DualFunction& d, double w, double m) {
    if (!(m > 0.0) || !(w > d.params().alpha * m) || !(w <= m)) {
        throw std::domain_error("policy_drawdown_prob: require alpha*m < w <= m");
    }
    return policy_optimal(d, w, m);
}

double policy_occupation(const MarketParams& p, const GammaRoots& roots, double w,
                         double fixed_m) {
    if (!(w > 0.0)) throw std::domain_error("policy_occupation: require w > 0");
    const double slope =
        w <= p.alpha * fixed_m ? 1.0 - roots.gamma2 : 1.0 - roots.gamma1;
    return p.risk_coeff() * slope * w;
}

std::string to_string(const StrategyKind& k) {
    switch (k.family) {
        case StrategyKind::Family::OptimalDrawdownTime: return "optimal";
        case StrategyKind::Family::RuinMin: return "ruin";
        case StrategyKind::Family::DrawdownProbMin: return "ddprob";
        case StrategyKind::Family::OccupationMin: return "occupation";
        case StrategyKind::Family::ConstantFraction: {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "const:%.12g", k.param);
            return buf;
        }
    }
    return "unknown";
}

StrategyKind parse_strategy(const std::string& text, double fallback_m) {
    if (text == "optimal") return StrategyKind::optimal();
    if (text == "ruin") return StrategyKind::ruin();
    if (text == "ddprob") return StrategyKind::drawdown_prob();
    if (text == "occupation") return StrategyKind::occupation(fallback_m);
    if (text.rfind("const:", 0) == 0) {
        std::size_t pos = 0;
        const std::string num = text.substr(6);
        double theta = std::stod(num, &pos);
        if (pos != num.size() || !std::isfinite(theta)) {
            throw std::invalid_argument("bad constant-fraction theta: " + text);
        }
        return StrategyKind::constant_fraction(theta);
    }
    throw std::invalid_argument("unknown strategy: " + text +
                                " (expected optimal|ruin|ddprob|occupation|const:<theta>)");
}

double policy_dispatch(const StrategyKind& kind, const DualFunction& d, double w, double m) {
    switch (kind.family) {
        case StrategyKind::Family::OptimalDrawdownTime:
            return policy_optimal(d, w, m);
        case StrategyKind::Family::RuinMin:
            return policy_ruin(d.params(), d.roots(), w);
        case StrategyKind::Family::DrawdownProbMin:
            return policy_drawdown_prob(d, w, m);
        case StrategyKind::Family::OccupationMin:
            return policy_occupation(d.params(), d.roots(), w, kind.param);
        case StrategyKind::Family::ConstantFraction:
            return kind.param * w;
    }
    throw std::logic_error("unreachable strategy family");
}

}  // namespace drawdown

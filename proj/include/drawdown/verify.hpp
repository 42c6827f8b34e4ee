#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drawdown/simulator.hpp"
#include "drawdown/solver.hpp"
#include "json.hpp"

namespace drawdown {

// One verification entry. "value" is the residual magnitude, margin or
// ratio the check measured; the pass rule (stay below, stay above) is
// baked in by the check that produced it.
struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    bool pass = true;

    void add(const CheckResult& c) {
        checks.push_back(c);
        pass = pass && c.pass;
    }
    nlohmann::json to_json() const;
};

struct VerifyOptions {
    int z_points = 500;
    int y_points = 500;
    int legendre_z_points = 100;
    int legendre_y_points = 10'000;
    int hjb_z_points = 100;
    int ordering_w_points = 200;
    bool with_simulation = true;
    std::int64_t sim_paths = 20'000;
    double sim_dt = 1e-3;
    std::uint64_t seed = 1;
};

// residual of the primal ODE
//   lam*zeta = -(kappa-r) z zeta_z - delta zeta_z^2/zeta_zz + 1{z <= alpha}
// evaluated through the dual relations zeta = zh(y) - y z, zeta_z = -y,
// zeta_zz = -1/zh_yy(y) at y = invert_dual(z); grid avoids alpha and 1
CheckResult check_bvp(const DualFunction& d, int z_points);

// residual of the dual ODE
//   lam*zh + (r-kappa-lam) y zh_y - delta y^2 zh_yy - 1{y >= yalpha} = 0
// on a log grid avoiding yalpha
CheckResult check_fbp(const DualFunction& d, int y_points);

// grid maximum of zh(y) - y z against zeta(z)
CheckResult check_legendre(const DualFunction& d, int z_points, int y_points);

// envelope condition: the state generator is zero at the feedback control
// and nonnegative at perturbed controls, with the minimum at the feedback
std::vector<CheckResult> check_hjb_minimizer(const DualFunction& d, int z_points);

// the four strategy relations plus the downward jump at the boundary
std::vector<CheckResult> check_orderings(const DualFunction& d, int w_points);

// every check above plus root/boundary identities and an optional Monte
// Carlo cross-check of the analytic value
VerificationReport full_report(const MarketParams& p, const VerifyOptions& opt = {});
VerificationReport full_report(const DualFunction& d, const VerifyOptions& opt = {});

}  // namespace drawdown

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "drawdown/policy.hpp"
#include "json.hpp"

namespace drawdown {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Two unbiased estimators of the expected lifetime drawdown E[X_tau]:
//
//   KilledLifetime      draw tau ~ Exp(lam) per path, return the drawdown
//                       clock at death (exact remainder added once a path
//                       is absorbed).
//   DiscountedOccupancy accumulate int_0^T e^(-lam s) 1{W <= alpha M} ds,
//                       with the closed-form tail e^(-lam T0)/lam added on
//                       absorption at T0. Equal to E[X_tau] by Fubini and
//                       the independence of the exponential clock; lower
//                       variance, needs lam*T >= 20 so the truncated mass
//                       e^(-lam T)/lam is negligible.
enum class Estimator { KilledLifetime, DiscountedOccupancy };

struct SimConfig {
    double dt = 1e-3;
    std::int64_t n_paths = 200'000;
    std::uint64_t seed = 1;
    Estimator estimator = Estimator::DiscountedOccupancy;
    double horizon = 0.0;  // 0 = max(20/lam, 50)
    PortfolioState initial{};
    // Wealth below wealth_floor_rel * initial m is treated as absorbed.
    // The exact dynamics never reach 0, but deep in drawdown the chance of
    // ever reclaiming the boundary is exponentially small, so cutting the
    // path there biases the estimate far below one standard error while
    // trimming most of the horizon. Set to 0 for absorption at 0 only.
    double wealth_floor_rel = 1e-7;
};

double default_horizon(double lam);

// throws ConfigError on a bad configuration
void check_config(const SimConfig& cfg, const MarketParams& p);

struct SimEstimate {
    std::string strategy;
    double mean = 0.0;
    double std_err = 0.0;
    std::int64_t n_paths = 0;
    double frac_absorbed = 0.0;
    double frac_max_increased = 0.0;
};

// One Euler step of
//   dW = [-(kappa - r) W + (mu - r) pi] dt + sigma pi dB,
// with the drawdown clock advanced by dt when the step starts at or below
// alpha*m (left-endpoint rule), the running maximum refreshed after the
// move, and wealth clamped to 0 (absorbing) on a nonpositive crossing.
// An absorbed state passes through unchanged except for the clock.
PortfolioState step(const PortfolioState& s, double pi, double dW, double dt,
                    const MarketParams& p);

SimEstimate run(const SimConfig& cfg, const StrategyKind& kind, const DualFunction& d);

struct PairDiff {
    std::size_t a = 0, b = 0;  // indices into the strategy list
    double mean_diff = 0.0;    // mean of (value_a - value_b) over shared paths
    double std_err_diff = 0.0;
};

struct CompareTable {
    std::vector<SimEstimate> estimates;
    std::vector<PairDiff> diffs;
};

// Runs every strategy over the same per-path random streams (common
// random numbers) and reports paired mean differences.
CompareTable compare(const SimConfig& cfg, const std::vector<StrategyKind>& kinds,
                     const DualFunction& d);

SimConfig sim_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SimEstimate& e);

void write_estimates_csv(std::ostream& out, const std::vector<SimEstimate>& rows);
void write_compare_csv(std::ostream& out, const CompareTable& table,
                       const std::vector<StrategyKind>& kinds);

}  // namespace drawdown

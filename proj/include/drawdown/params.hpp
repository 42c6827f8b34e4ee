#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace drawdown {

// Model constants, all in annual units. Constraints are strict: the
// closed-form solution degenerates at equality (mu = r collapses the
// quadratic roots, kappa = r removes the drawdown drift).
struct MarketParams {
    double r;      // riskless rate, > 0
    double mu;     // risky drift, > r
    double sigma;  // risky volatility, > 0
    double kappa;  // proportional consumption rate, > r
    double lam;    // mortality hazard rate, > 0
    double alpha;  // drawdown proportion, in (0, 1)

    // half squared Sharpe ratio, the constant driving the dual ODE
    double delta() const {
        double s = (mu - r) / sigma;
        return 0.5 * s * s;
    }

    // (mu - r) / sigma^2, the common factor of every feedback strategy
    double risk_coeff() const { return (mu - r) / (sigma * sigma); }
};

enum class ParamError {
    NonFinite,
    RNotPositive,
    SigmaNotPositive,
    LamNotPositive,
    MuNotAboveR,
    KappaNotAboveR,
    AlphaOutOfRange,
};

const char* to_string(ParamError e);

class ValidationError : public std::invalid_argument {
public:
    ValidationError(ParamError code, const std::string& what)
        : std::invalid_argument(what), code_(code) {}
    ParamError code() const { return code_; }

private:
    ParamError code_;
};

// Returns the validated parameter set unchanged, or throws ValidationError
// naming the first violated constraint (checked in a fixed order).
MarketParams validate(const MarketParams& raw);

// JSON document with exactly the six keys r, mu, sigma, kappa, lam, alpha.
// Unknown keys are rejected. The result is validated.
MarketParams params_from_json(const nlohmann::json& doc);
MarketParams params_from_file(const std::string& path);

nlohmann::json to_json(const MarketParams& p);

}  // namespace drawdown

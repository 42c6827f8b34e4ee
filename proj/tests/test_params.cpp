#include "drawdown/params.hpp"

#include <limits>

#include "doctest.h"

using namespace drawdown;

namespace {

MarketParams good() { return {0.02, 0.06, 0.20, 0.04, 0.04, 0.8}; }

ParamError code_of(const MarketParams& p) {
    try {
        validate(p);
    } catch (const ValidationError& e) {
        return e.code();
    }
    throw std::logic_error("expected a validation failure");
}

}  // namespace

TEST_CASE("valid parameters pass and validation is idempotent") {
    const MarketParams p = validate(good());
    const MarketParams q = validate(p);
    CHECK(q.r == p.r);
    CHECK(q.mu == p.mu);
    CHECK(q.sigma == p.sigma);
    CHECK(q.kappa == p.kappa);
    CHECK(q.lam == p.lam);
    CHECK(q.alpha == p.alpha);
}

TEST_CASE("each constraint maps to its own error") {
    MarketParams p = good();
    p.mu = p.r;
    CHECK(code_of(p) == ParamError::MuNotAboveR);

    p = good();
    p.kappa = p.r;
    CHECK(code_of(p) == ParamError::KappaNotAboveR);

    p = good();
    p.alpha = 1.0;
    CHECK(code_of(p) == ParamError::AlphaOutOfRange);
    p.alpha = 0.0;
    CHECK(code_of(p) == ParamError::AlphaOutOfRange);

    p = good();
    p.sigma = 0.0;
    CHECK(code_of(p) == ParamError::SigmaNotPositive);

    p = good();
    p.lam = -0.01;
    CHECK(code_of(p) == ParamError::LamNotPositive);

    p = good();
    p.r = 0.0;
    CHECK(code_of(p) == ParamError::RNotPositive);

    p = good();
    p.mu = std::numeric_limits<double>::quiet_NaN();
    CHECK(code_of(p) == ParamError::NonFinite);
    p.mu = std::numeric_limits<double>::infinity();
    CHECK(code_of(p) == ParamError::NonFinite);
}

TEST_CASE("strict inequalities: boundary values are rejected") {
    MarketParams p = good();
    p.mu = std::nextafter(p.r, 0.0);
    CHECK_THROWS_AS(validate(p), ValidationError);
    p = good();
    p.mu = std::nextafter(p.r, 1.0);  // smallest admissible drift gap
    CHECK_NOTHROW(validate(p));
}

TEST_CASE("json loading enforces the exact key set") {
    const nlohmann::json doc = to_json(good());
    const MarketParams p = params_from_json(doc);
    CHECK(p.alpha == 0.8);

    nlohmann::json extra = doc;
    extra["spread"] = 0.01;
    CHECK_THROWS_WITH_AS(params_from_json(extra), "unknown parameter key: spread",
                         std::invalid_argument);

    nlohmann::json missing = doc;
    missing.erase("lam");
    CHECK_THROWS_AS(params_from_json(missing), std::invalid_argument);

    nlohmann::json wrong_type = doc;
    wrong_type["sigma"] = "0.2";
    CHECK_THROWS_AS(params_from_json(wrong_type), std::invalid_argument);

    CHECK_THROWS_AS(params_from_json(nlohmann::json::array()), std::invalid_argument);
}

TEST_CASE("derived quantities") {
    const MarketParams p = good();
    CHECK(p.delta() == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(p.risk_coeff() == doctest::Approx(1.0).epsilon(1e-12));
}

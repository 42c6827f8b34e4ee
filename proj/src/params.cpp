#include "drawdown/params.hpp"

#include <array>
#include <fstream>

namespace drawdown {

const char* to_string(ParamError e) {
    switch (e) {
        case ParamError::NonFinite: return "NonFinite";
        case ParamError::RNotPositive: return "RNotPositive";
        case ParamError::SigmaNotPositive: return "SigmaNotPositive";
        case ParamError::LamNotPositive: return "LamNotPositive";
        case ParamError::MuNotAboveR: return "MuNotAboveR";
        case ParamError::KappaNotAboveR: return "KappaNotAboveR";
        case ParamError::AlphaOutOfRange: return "AlphaOutOfRange";
    }
    return "Unknown";
}

namespace {

[[noreturn]] void fail(ParamError code, const std::string& detail) {
    throw ValidationError(code, std::string(to_string(code)) + ": " + detail);
}

}  // namespace

MarketParams validate(const MarketParams& p) {
    const std::array<double, 6> vals = {p.r, p.mu, p.sigma, p.kappa, p.lam, p.alpha};
    for (double v : vals) {
        if (!std::isfinite(v)) fail(ParamError::NonFinite, "all parameters must be finite");
    }
    if (!(p.r > 0.0)) fail(ParamError::RNotPositive, "require r > 0");
    if (!(p.sigma > 0.0)) fail(ParamError::SigmaNotPositive, "require sigma > 0");
    if (!(p.lam > 0.0)) fail(ParamError::LamNotPositive, "require lam > 0");
    if (!(p.mu > p.r)) fail(ParamError::MuNotAboveR, "require mu > r");
    if (!(p.kappa > p.r)) fail(ParamError::KappaNotAboveR, "require kappa > r");
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) fail(ParamError::AlphaOutOfRange, "require 0 < alpha < 1");
    return p;
}

MarketParams params_from_json(const nlohmann::json& doc) {
    static const std::array<const char*, 6> keys = {"r", "mu", "sigma", "kappa", "lam", "alpha"};
    if (!doc.is_object()) throw std::invalid_argument("parameter document must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || (it.key() == k);
        if (!known) throw std::invalid_argument("unknown parameter key: " + it.key());
    }
    MarketParams p{};
    std::array<double*, 6> slots = {&p.r, &p.mu, &p.sigma, &p.kappa, &p.lam, &p.alpha};
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (!doc.contains(keys[i])) throw std::invalid_argument(std::string("missing parameter key: ") + keys[i]);
        const auto& v = doc.at(keys[i]);
        if (!v.is_number()) throw std::invalid_argument(std::string("parameter must be a number: ") + keys[i]);
        *slots[i] = v.get<double>();
    }
    return validate(p);
}

MarketParams params_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open parameter file: " + path);
    nlohmann::json doc;
    in >> doc;
    return params_from_json(doc);
}

nlohmann::json to_json(const MarketParams& p) {
    return nlohmann::json{
        {"r", p.r},       {"mu", p.mu},   {"sigma", p.sigma},
        {"kappa", p.kappa}, {"lam", p.lam}, {"alpha", p.alpha},
    };
}

}  // namespace drawdown

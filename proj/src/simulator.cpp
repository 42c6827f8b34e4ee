#include "drawdown/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <thread>

#include "drawdown/rng.hpp"

namespace drawdown {

double default_horizon(double lam) { return std::max(20.0 / lam, 50.0); }

void check_config(const SimConfig& cfg, const MarketParams& p) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be positive");
    if (cfg.n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (!(cfg.wealth_floor_rel >= 0.0 && cfg.wealth_floor_rel < 0.01)) {
        throw ConfigError("wealth_floor_rel must lie in [0, 0.01)");
    }
    try {
        check_state(cfg.initial);
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("bad initial state: ") + e.what());
    }
    if (cfg.estimator == Estimator::DiscountedOccupancy) {
        const double horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(p.lam);
        if (!(horizon * p.lam >= 20.0 - 1e-9)) {
            throw ConfigError("discounted estimator needs horizon * lam >= 20");
        }
    }
}

PortfolioState step(const PortfolioState& s, double pi, double dW, double dt,
                    const MarketParams& p) {
    PortfolioState out = s;
    const bool in_drawdown = s.w <= p.alpha * s.m;
    if (in_drawdown) out.x = s.x + dt;
    if (s.w <= 0.0) return out;  // absorbed
    double w = s.w + (-(p.kappa - p.r) * s.w + (p.mu - p.r) * pi) * dt + p.sigma * pi * dW;
    if (w <= 0.0) w = 0.0;
    out.w = w;
    out.m = std::max(s.m, w);
    return out;
}

namespace {

// ---------------------------------------------------------------------
// Chebyshev proxy for the above-boundary optimal policy.
//
// pi*/m on (alpha, 1] has a square-root profile at z = 1 (the dual
// curvature vanishes at y1), so it is fitted in u = sqrt(1 - z), where it
// is analytic. The fit is validated against the exact root-solve and the
// evaluator falls back to the solver when validation fails.
struct Chebyshev {
    double lo = 0.0, hi = 1.0;
    std::vector<double> coef;

    double eval(double u) const {
        const double t = (2.0 * u - lo - hi) / (hi - lo);
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t k = coef.size() - 1; k >= 1; --k) {
            const double b0 = coef[k] + 2.0 * t * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return coef[0] + t * b1 - b2;
    }
};

Chebyshev fit_chebyshev(const std::function<double(double)>& f, double lo, double hi, int n) {
    Chebyshev c;
    c.lo = lo;
    c.hi = hi;
    std::vector<double> fv(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double t = std::cos(M_PI * (j + 0.5) / n);
        fv[static_cast<std::size_t>(j)] = f(lo + (hi - lo) * 0.5 * (t + 1.0));
    }
    c.coef.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += fv[static_cast<std::size_t>(j)] * std::cos(M_PI * k * (j + 0.5) / n);
        c.coef[static_cast<std::size_t>(k)] = (k == 0 ? 1.0 : 2.0) * acc / n;
    }
    // drop negligible high-order terms
    double scale = 0.0;
    for (double v : fv) scale = std::max(scale, std::abs(v));
    std::size_t keep = c.coef.size();
    while (keep > 2 && std::abs(c.coef[keep - 1]) < 1e-15 * std::max(scale, 1.0)) --keep;
    c.coef.resize(keep);
    return c;
}

class StrategyEvaluator {
public:
    StrategyEvaluator(const StrategyKind& kind, const DualFunction& d)
        : family_(kind.family), dual_(&d) {
        const auto& p = d.params();
        alpha_ = p.alpha;
        slope_dd_ = p.risk_coeff() * (1.0 - d.roots().gamma2);
        slope_ruin_ = p.risk_coeff() * (1.0 - d.roots().gamma1);
        theta_ = kind.param;
        ceiling_ = alpha_ * kind.param;
        if (family_ == StrategyKind::Family::OptimalDrawdownTime ||
            family_ == StrategyKind::Family::DrawdownProbMin) {
            build_band_proxy();
        }
    }

    // dollar amount for the current state; pure
    double operator()(double w, double m) const {
        switch (family_) {
            case StrategyKind::Family::OptimalDrawdownTime:
            case StrategyKind::Family::DrawdownProbMin: {
                const double z = w / m;
                if (z < alpha_) return slope_dd_ * w;
                return m * band_policy(z);
            }
            case StrategyKind::Family::RuinMin:
                return slope_ruin_ * w;
            case StrategyKind::Family::OccupationMin:
                return (w <= ceiling_ ? slope_dd_ : slope_ruin_) * w;
            case StrategyKind::Family::ConstantFraction:
                return theta_ * w;
        }
        return 0.0;
    }

private:
    double exact_band(double z) const { return policy_optimal(*dual_, z, 1.0); }

    double band_policy(double z) const {
        if (!cheb_ok_) return exact_band(z);
        const double u = std::sqrt(1.0 - z);
        return std::max(0.0, cheb_.eval(u));
    }

    void build_band_proxy() {
        const double umax = std::sqrt(1.0 - alpha_);
        auto f = [&](double u) { return exact_band(1.0 - u * u); };
        double scale = std::max(1.0, exact_band(alpha_));
        for (int n = 16; n <= 128; n *= 2) {
            cheb_ = fit_chebyshev(f, 0.0, umax, n);
            double worst = 0.0;
            const int checks = 3 * n + 1;
            for (int i = 0; i <= checks; ++i) {
                const double u = umax * i / checks;
                worst = std::max(worst, std::abs(cheb_.eval(u) - f(u)));
            }
            if (worst < 1e-11 * scale) {
                cheb_ok_ = true;
                std::fprintf(stderr, "cheb fit ok n=%d kept=%zu worst=%.2e\n", n, cheb_.coef.size(), worst);
                return;
            }
            std::fprintf(stderr, "cheb fit n=%d worst=%.2e\n", n, worst);
        }
        std::fprintf(stderr, "cheb fit FAILED\n");
        cheb_ok_ = false;  // exact solve per step
    }

    StrategyKind::Family family_;
    const DualFunction* dual_;
    double alpha_ = 0.0, slope_dd_ = 0.0, slope_ruin_ = 0.0, theta_ = 0.0, ceiling_ = 0.0;
    Chebyshev cheb_;
    bool cheb_ok_ = false;
};

struct PathArrays {
    std::vector<double> value;
    std::vector<std::uint8_t> absorbed;
    std::vector<std::uint8_t> max_up;
};

int thread_count(std::int64_t n_paths) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("DRAWDOWN_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    const std::int64_t per = 1024;
    return static_cast<int>(std::max<std::int64_t>(
        1, std::min<std::int64_t>(hw, (n_paths + per - 1) / per)));
}

template <class Body>
void parallel_paths(std::int64_t n, const Body& body) {
    const int nt = thread_count(n);
    if (nt == 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    const std::int64_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const std::int64_t b = t * chunk;
        const std::int64_t e = std::min<std::int64_t>(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
    for (auto& th : pool) th.join();
}

struct EngineParams {
    double r, kappa, mu, sigma, lam, alpha;
    double dt, sqrt_dt, horizon;
    std::int64_t n_full;
    double dt_rem;
    double floor_abs;
    double m_tolerance;  // running max counts as increased above this
    double w0, m0, x0;
    std::uint64_t seed;
};

EngineParams make_engine_params(const SimConfig& cfg, const MarketParams& p) {
    EngineParams ep{};
    ep.r = p.r;
    ep.kappa = p.kappa;
    ep.mu = p.mu;
    ep.sigma = p.sigma;
    ep.lam = p.lam;
    ep.alpha = p.alpha;
    ep.dt = cfg.dt;
    ep.sqrt_dt = std::sqrt(cfg.dt);
    ep.horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(p.lam);
    ep.n_full = static_cast<std::int64_t>(std::floor(ep.horizon / cfg.dt + 1e-9));
    ep.dt_rem = ep.horizon - static_cast<double>(ep.n_full) * cfg.dt;
    if (ep.dt_rem < 1e-12) ep.dt_rem = 0.0;
    ep.floor_abs = cfg.wealth_floor_rel * cfg.initial.m;
    ep.m_tolerance = cfg.initial.m * (1.0 + 10.0 * p.sigma * ep.sqrt_dt);
    ep.w0 = cfg.initial.w;
    ep.m0 = cfg.initial.m;
    ep.x0 = cfg.initial.x;
    ep.seed = cfg.seed;
    return ep;
}

// discounted occupancy of the drawdown set, plus closed-form tail on
// absorption; resyncs the running discount factor periodically
void path_discounted(const EngineParams& ep, const StrategyEvaluator& eval,
                     std::int64_t path, double& value, bool& absorbed, bool& max_up) {
    PathRng rng(ep.seed, static_cast<std::uint64_t>(path));
    double w = ep.w0, m = ep.m0;
    double acc = 0.0, df = 1.0;
    const double edt = std::exp(-ep.lam * ep.dt);
    const double wstep = (1.0 - edt) / ep.lam;
    const double drift_c = -(ep.kappa - ep.r) * ep.dt;
    const double pi_c = (ep.mu - ep.r) * ep.dt;
    const double vol_c = ep.sigma * ep.sqrt_dt;
    absorbed = false;
    if (w <= ep.floor_abs) {
        absorbed = true;
        acc = 1.0 / ep.lam;
    } else {
        for (std::int64_t k = 0; k < ep.n_full; ++k) {
            if (w <= ep.alpha * m) acc += df * wstep;
            const double pi = eval(w, m);
            const double xi = rng.normal();
            w += drift_c * w + pi * (pi_c + vol_c * xi);
            df *= edt;
            if (w <= ep.floor_abs) {
                absorbed = true;
                acc += df / ep.lam;
                w = 0.0;
                break;
            }
            if (w > m) m = w;
            if ((k & 0x1FFF) == 0x1FFF) df = std::exp(-ep.lam * ep.dt * static_cast<double>(k + 1));
        }
        if (!absorbed && ep.dt_rem > 0.0 && w <= ep.alpha * m) {
            acc += df * (1.0 - std::exp(-ep.lam * ep.dt_rem)) / ep.lam;
        }
    }
    value = ep.x0 + acc;
    max_up = m > ep.m_tolerance;
}

// drawdown clock at an exponential death time
void path_killed(const EngineParams& ep, const StrategyEvaluator& eval,
                 std::int64_t path, double& value, bool& absorbed, bool& max_up) {
    PathRng rng(ep.seed, static_cast<std::uint64_t>(path));
    const double tau = rng.exponential(ep.lam);
    double w = ep.w0, m = ep.m0, clock = 0.0;
    const double drift_c = -(ep.kappa - ep.r) * ep.dt;
    const double pi_c = (ep.mu - ep.r) * ep.dt;
    const double vol_c = ep.sigma * ep.sqrt_dt;
    absorbed = false;
    if (w <= ep.floor_abs) {
        absorbed = true;
        clock = tau;
    } else {
        std::int64_t k = 0;
        while ((static_cast<double>(k) + 1.0) * ep.dt <= tau) {
            const bool ind = w <= ep.alpha * m;
            if (ind) clock += ep.dt;
            const double pi = eval(w, m);
            const double xi = rng.normal();
            w += drift_c * w + pi * (pi_c + vol_c * xi);
            ++k;
            if (w <= ep.floor_abs) {
                absorbed = true;
                clock += tau - static_cast<double>(k) * ep.dt;
                w = 0.0;
                break;
            }
            if (w > m) m = w;
        }
        if (!absorbed) {
            const double dt_rem = tau - static_cast<double>(k) * ep.dt;
            if (dt_rem > 0.0 && w <= ep.alpha * m) clock += dt_rem;
        }
    }
    value = ep.x0 + clock;
    max_up = m > ep.m_tolerance;
}

PathArrays run_paths(const SimConfig& cfg, const StrategyKind& kind, const DualFunction& d) {
    check_config(cfg, d.params());
    const EngineParams ep = make_engine_params(cfg, d.params());
    const StrategyEvaluator eval(kind, d);
    PathArrays out;
    const auto n = static_cast<std::size_t>(cfg.n_paths);
    out.value.assign(n, 0.0);
    out.absorbed.assign(n, 0);
    out.max_up.assign(n, 0);
    const bool discounted = cfg.estimator == Estimator::DiscountedOccupancy;
    parallel_paths(cfg.n_paths, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t pth = b; pth < e; ++pth) {
            double v = 0.0;
            bool abs_flag = false, up_flag = false;
            if (discounted) {
                path_discounted(ep, eval, pth, v, abs_flag, up_flag);
            } else {
                path_killed(ep, eval, pth, v, abs_flag, up_flag);
            }
            const auto i = static_cast<std::size_t>(pth);
            out.value[i] = v;
            out.absorbed[i] = abs_flag ? 1 : 0;
            out.max_up[i] = up_flag ? 1 : 0;
        }
    });
    return out;
}

SimEstimate summarize(const PathArrays& pa, const std::string& name) {
    SimEstimate est;
    est.strategy = name;
    est.n_paths = static_cast<std::int64_t>(pa.value.size());
    const double n = static_cast<double>(pa.value.size());
    double mean = 0.0;
    for (double v : pa.value) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : pa.value) ss += (v - mean) * (v - mean);
    est.mean = mean;
    est.std_err = pa.value.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    double na = 0.0, nu = 0.0;
    for (auto f : pa.absorbed) na += f;
    for (auto f : pa.max_up) nu += f;
    est.frac_absorbed = na / n;
    est.frac_max_increased = nu / n;
    return est;
}

}  // namespace

SimEstimate run(const SimConfig& cfg, const StrategyKind& kind, const DualFunction& d) {
    return summarize(run_paths(cfg, kind, d), to_string(kind));
}

CompareTable compare(const SimConfig& cfg, const std::vector<StrategyKind>& kinds,
                     const DualFunction& d) {
    if (kinds.size() < 2) throw ConfigError("compare needs at least two strategies");
    CompareTable table;
    std::vector<PathArrays> all;
    all.reserve(kinds.size());
    for (const auto& k : kinds) {
        all.push_back(run_paths(cfg, k, d));
        table.estimates.push_back(summarize(all.back(), to_string(k)));
    }
    const auto n = all.front().value.size();
    const double dn = static_cast<double>(n);
    for (std::size_t a = 0; a < kinds.size(); ++a) {
        for (std::size_t b = a + 1; b < kinds.size(); ++b) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += all[a].value[i] - all[b].value[i];
            mean /= dn;
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dvi = all[a].value[i] - all[b].value[i] - mean;
                ss += dvi * dvi;
            }
            PairDiff pd;
            pd.a = a;
            pd.b = b;
            pd.mean_diff = mean;
            pd.std_err_diff = n > 1 ? std::sqrt(ss / (dn - 1.0) / dn) : 0.0;
            table.diffs.push_back(pd);
        }
    }
    return table;
}

SimConfig sim_config_from_json(const nlohmann::json& doc) {
    SimConfig cfg;
    if (!doc.is_object()) throw ConfigError("sim config must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& k = it.key();
        if (k == "dt") cfg.dt = it.value().get<double>();
        else if (k == "n_paths") cfg.n_paths = it.value().get<std::int64_t>();
        else if (k == "seed") cfg.seed = it.value().get<std::uint64_t>();
        else if (k == "horizon") cfg.horizon = it.value().get<double>();
        else if (k == "wealth_floor_rel") cfg.wealth_floor_rel = it.value().get<double>();
        else if (k == "estimator") {
            const std::string v = it.value().get<std::string>();
            if (v == "killed") cfg.estimator = Estimator::KilledLifetime;
            else if (v == "discounted") cfg.estimator = Estimator::DiscountedOccupancy;
            else throw ConfigError("estimator must be 'killed' or 'discounted'");
        } else if (k == "initial") {
            const auto& s = it.value();
            cfg.initial.w = s.at("w").get<double>();
            cfg.initial.m = s.at("m").get<double>();
            cfg.initial.x = s.value("x", 0.0);
        } else {
            throw ConfigError("unknown sim config key: " + k);
        }
    }
    return cfg;
}

nlohmann::json to_json(const SimEstimate& e) {
    return nlohmann::json{
        {"strategy", e.strategy},
        {"mean", e.mean},
        {"std_err", e.std_err},
        {"n_paths", e.n_paths},
        {"frac_absorbed", e.frac_absorbed},
        {"frac_max_increased", e.frac_max_increased},
    };
}

namespace {

void csv_row(std::ostream& out, const SimEstimate& e) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g,%lld,%.12g,%.12g\n", e.strategy.c_str(),
                  e.mean, e.std_err, static_cast<long long>(e.n_paths), e.frac_absorbed,
                  e.frac_max_increased);
    out << buf;
}

}  // namespace

void write_estimates_csv(std::ostream& out, const std::vector<SimEstimate>& rows) {
    out << "strategy,mean,std_err,n_paths,frac_absorbed,frac_max_increased\n";
    for (const auto& e : rows) csv_row(out, e);
}

void write_compare_csv(std::ostream& out, const CompareTable& table,
                       const std::vector<StrategyKind>& kinds) {
    write_estimates_csv(out, table.estimates);
    out << "\nstrategy_a,strategy_b,mean_diff,std_err_diff\n";
    for (const auto& pd : table.diffs) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s,%s,%.12g,%.12g\n", to_string(kinds[pd.a]).c_str(),
                      to_string(kinds[pd.b]).c_str(), pd.mean_diff, pd.std_err_diff);
        out << buf;
    }
}

}  // namespace drawdown

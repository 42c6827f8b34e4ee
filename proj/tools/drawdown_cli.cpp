// Command-line front end: closed-form solve, value/policy evaluation,
// Monte Carlo simulation and comparison, verification report, and a
// scale-free sweep table for plotting.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/validation error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drawdown/policy.hpp"
#include "drawdown/simulator.hpp"
#include "drawdown/solver.hpp"
#include "drawdown/verify.hpp"

namespace {

using namespace drawdown;

struct ParamSource {
    std::string file;
    std::vector<double> inline_vals;  // r mu sigma kappa lam alpha

    MarketParams load() const {
        if (!file.empty() && !inline_vals.empty()) {
            throw std::invalid_argument("give either --params or the six inline values, not both");
        }
        if (!file.empty()) return params_from_file(file);
        if (inline_vals.size() == 6) {
            MarketParams p{inline_vals[0], inline_vals[1], inline_vals[2],
                           inline_vals[3], inline_vals[4], inline_vals[5]};
            return validate(p);
        }
        throw std::invalid_argument("parameters required: --params <file> or --values r mu sigma kappa lam alpha");
    }
};

void add_param_options(CLI::App* sub, ParamSource& src) {
    sub->add_option("--params,-p", src.file, "JSON parameter file with keys r,mu,sigma,kappa,lam,alpha");
    sub->add_option("--values", src.inline_vals, "inline parameters: r mu sigma kappa lam alpha")
        ->expected(6);
}

struct OutputTarget {
    std::string path;

    std::ostream& stream(std::ofstream& file) const {
        if (path.empty()) return std::cout;
        file.open(path);
        if (!file) throw std::invalid_argument("cannot open output file: " + path);
        return file;
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

int run_app(int argc, char** argv) {
    CLI::App app{"Expected-lifetime-in-drawdown solver and simulator"};
    app.require_subcommand(1);

    // ---- solve ----------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "roots, free boundaries and residual diagnostics");
    ParamSource solve_ps;
    OutputTarget solve_out;
    std::string solve_format = "json";
    add_param_options(solve, solve_ps);
    solve->add_option("--out", solve_out.path, "output file (default stdout)");
    solve->add_option("--format", solve_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    solve->callback([&] {
        DualFunction d(solve_ps.load());
        std::ofstream f;
        auto& os = solve_out.stream(f);
        const auto diag = d.diagnostics();
        if (solve_format == "json") {
            os << diag.dump(2) << "\n";
        } else {
            os << "key,value\n";
            for (auto it = diag.begin(); it != diag.end(); ++it) {
                os << it.key() << "," << fmt(it.value().get<double>()) << "\n";
            }
        }
    });

    // ---- value ----------------------------------------------------------
    auto* val = app.add_subcommand("value", "psi(w, m, x), expected lifetime in drawdown");
    ParamSource val_ps;
    OutputTarget val_out;
    std::string val_format = "json";
    double vw = 0.0, vm = 1.0, vx = 0.0;
    add_param_options(val, val_ps);
    val->add_option("--w", vw, "current wealth")->required();
    val->add_option("--m", vm, "running maximum wealth (default 1)");
    val->add_option("--x", vx, "drawdown time already accumulated");
    val->add_option("--out", val_out.path, "output file");
    val->add_option("--format", val_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    val->callback([&] {
        DualFunction d(val_ps.load());
        const double psi = value(d, PortfolioState{vw, vm, vx});
        std::ofstream f;
        auto& os = val_out.stream(f);
        if (val_format == "json") {
            os << nlohmann::json{{"w", vw}, {"m", vm}, {"x", vx}, {"psi", psi}}.dump(2) << "\n";
        } else {
            os << "w,m,x,psi\n" << fmt(vw) << "," << fmt(vm) << "," << fmt(vx) << "," << fmt(psi) << "\n";
        }
    });

    // ---- policy ---------------------------------------------------------
    auto* pol = app.add_subcommand("policy", "dollar amount in the risky asset for a strategy");
    ParamSource pol_ps;
    OutputTarget pol_out;
    std::string pol_format = "json";
    std::string pol_strategy = "optimal";
    double pw = 0.0, pm = 1.0;
    add_param_options(pol, pol_ps);
    pol->add_option("--w", pw, "current wealth")->required();
    pol->add_option("--m", pm, "running maximum wealth (default 1)");
    pol->add_option("--strategy", pol_strategy, "optimal|ruin|ddprob|occupation|const:<theta>");
    pol->add_option("--out", pol_out.path, "output file");
    pol->add_option("--format", pol_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    pol->callback([&] {
        DualFunction d(pol_ps.load());
        const StrategyKind kind = parse_strategy(pol_strategy, pm);
        const double pi = policy_dispatch(kind, d, pw, pm);
        std::ofstream f;
        auto& os = pol_out.stream(f);
        if (pol_format == "json") {
            os << nlohmann::json{{"w", pw}, {"m", pm}, {"strategy", to_string(kind)}, {"pi", pi}}.dump(2)
               << "\n";
        } else {
            os << "w,m,strategy,pi\n"
               << fmt(pw) << "," << fmt(pm) << "," << to_string(kind) << "," << fmt(pi) << "\n";
        }
    });

    // ---- sweep ----------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "scale-free table over z = w/m in (0, 1]");
    ParamSource sweep_ps;
    OutputTarget sweep_out;
    std::string sweep_format = "csv";
    int grid_n = 100;
    add_param_options(sweep, sweep_ps);
    sweep->add_option("--grid", grid_n, "number of rows (default 100)")->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_out.path, "output file");
    sweep->add_option("--format", sweep_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    sweep->callback([&] {
        DualFunction d(sweep_ps.load());
        const auto& p = d.params();
        std::ofstream f;
        auto& os = sweep_out.stream(f);
        nlohmann::json rows = nlohmann::json::array();
        if (sweep_format == "csv") {
            os << "z,psi,pi_opt_over_m,pi_ruin_over_m,pi_ddprob_over_m,pi_occ_over_m\n";
        }
        for (int i = 1; i <= grid_n; ++i) {
            const double z = static_cast<double>(i) / grid_n;
            const double psi = zeta(d, z);
            const double pi_opt = policy_optimal(d, z, 1.0);
            const double pi_ruin = policy_ruin(p, d.roots(), z);
            const double pi_dd =
                z > p.alpha ? policy_drawdown_prob(d, z, 1.0) : std::nan("");
            const double pi_occ = policy_occupation(p, d.roots(), z, 1.0);
            if (sweep_format == "csv") {
                os << fmt(z) << "," << fmt(psi) << "," << fmt(pi_opt) << "," << fmt(pi_ruin) << ","
                   << fmt(pi_dd) << "," << fmt(pi_occ) << "\n";
            } else {
                rows.push_back(nlohmann::json{{"z", z},
                                              {"psi", psi},
                                              {"pi_opt_over_m", pi_opt},
                                              {"pi_ruin_over_m", pi_ruin},
                                              {"pi_ddprob_over_m", pi_dd},
                                              {"pi_occ_over_m", pi_occ}});
            }
        }
        if (sweep_format == "json") os << rows.dump(2) << "\n";
    });

    // ---- simulate / compare ---------------------------------------------
    struct SimFlags {
        ParamSource ps;
        OutputTarget out;
        std::string format = "csv";
        std::string config_file;
        std::vector<std::string> strategies;
        double w = 0.5, m = 1.0, x = 0.0;
        double dt = -1.0, horizon = -1.0, floor_rel = -1.0;
        std::int64_t paths = -1;
        std::uint64_t seed = 0;
        bool seed_set = false, w_set = false, m_set = false, x_set = false;
        std::string estimator;

        SimConfig build() const {
            SimConfig cfg;
            if (!config_file.empty()) {
                std::ifstream in(config_file);
                if (!in) throw std::invalid_argument("cannot open sim config: " + config_file);
                nlohmann::json doc;
                in >> doc;
                cfg = sim_config_from_json(doc);
            }
            if (w_set) cfg.initial.w = w;
            if (m_set) cfg.initial.m = m;
            if (x_set) cfg.initial.x = x;
            if (dt > 0.0) cfg.dt = dt;
            if (horizon >= 0.0) cfg.horizon = horizon;
            if (floor_rel >= 0.0) cfg.wealth_floor_rel = floor_rel;
            if (paths >= 0) cfg.n_paths = paths;
            if (seed_set) cfg.seed = seed;
            if (!estimator.empty()) {
                cfg.estimator = estimator == "killed" ? Estimator::KilledLifetime
                                                      : Estimator::DiscountedOccupancy;
            }
            return cfg;
        }
    };

    auto add_sim_options = [](CLI::App* sub, SimFlags& sf) {
        add_param_options(sub, sf.ps);
        sub->add_option("--sim-config", sf.config_file, "JSON simulation config (flags override)");
        sub->add_option("--w", sf.w, "initial wealth")->each([&sf](const std::string&) { sf.w_set = true; });
        sub->add_option("--m", sf.m, "initial running maximum")->each([&sf](const std::string&) { sf.m_set = true; });
        sub->add_option("--x", sf.x, "initial drawdown clock")->each([&sf](const std::string&) { sf.x_set = true; });
        sub->add_option("--dt", sf.dt, "time step in years (default 1e-3)");
        sub->add_option("--paths", sf.paths, "number of Monte Carlo paths");
        sub->add_option("--horizon", sf.horizon, "truncation horizon for the discounted estimator");
        sub->add_option("--seed", sf.seed, "RNG seed")->each([&sf](const std::string&) { sf.seed_set = true; });
        sub->add_option("--estimator", sf.estimator, "killed|discounted")
            ->check(CLI::IsMember({"killed", "discounted"}));
        sub->add_option("--floor-rel", sf.floor_rel,
                        "numerical absorption floor relative to initial m (0 disables)");
        sub->add_option("--out", sf.out.path, "output file");
        sub->add_option("--format", sf.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    };

    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of lifetime drawdown");
    SimFlags sim_f;
    add_sim_options(sim, sim_f);
    sim->add_option("--strategy", sim_f.strategies, "strategy to simulate")->expected(1);
    sim->callback([&] {
        DualFunction d(sim_f.ps.load());
        const SimConfig cfg = sim_f.build();
        const std::string name = sim_f.strategies.empty() ? "optimal" : sim_f.strategies.front();
        const SimEstimate est = run(cfg, parse_strategy(name, cfg.initial.m), d);
        std::ofstream f;
        auto& os = sim_f.out.stream(f);
        if (sim_f.format == "json") {
            os << to_json(est).dump(2) << "\n";
        } else {
            write_estimates_csv(os, {est});
        }
    });

    auto* cmp = app.add_subcommand("compare", "common-random-number strategy comparison");
    SimFlags cmp_f;
    add_sim_options(cmp, cmp_f);
    cmp->add_option("--strategy", cmp_f.strategies, "strategies (repeat, at least two)");
    cmp->callback([&] {
        DualFunction d(cmp_f.ps.load());
        const SimConfig cfg = cmp_f.build();
        std::vector<StrategyKind> kinds;
        for (const auto& s : cmp_f.strategies) kinds.push_back(parse_strategy(s, cfg.initial.m));
        const CompareTable table = compare(cfg, kinds, d);
        std::ofstream f;
        auto& os = cmp_f.out.stream(f);
        if (cmp_f.format == "json") {
            nlohmann::json est = nlohmann::json::array();
            for (const auto& e : table.estimates) est.push_back(to_json(e));
            nlohmann::json diffs = nlohmann::json::array();
            for (const auto& pd : table.diffs) {
                diffs.push_back(nlohmann::json{{"strategy_a", to_string(kinds[pd.a])},
                                               {"strategy_b", to_string(kinds[pd.b])},
                                               {"mean_diff", pd.mean_diff},
                                               {"std_err_diff", pd.std_err_diff}});
            }
            os << nlohmann::json{{"estimates", est}, {"differences", diffs}}.dump(2) << "\n";
        } else {
            write_compare_csv(os, table, kinds);
        }
    });

    // ---- verify -----------------------------------------------------------
    auto* ver = app.add_subcommand("verify", "run every analytic check; exit 1 on failure");
    ParamSource ver_ps;
    OutputTarget ver_out;
    std::int64_t ver_budget = 20'000;
    std::uint64_t ver_seed = 1;
    double perturb = 1.0;
    bool no_sim = false;
    add_param_options(ver, ver_ps);
    ver->add_option("--budget", ver_budget, "Monte Carlo paths for the cross-check");
    ver->add_option("--seed", ver_seed, "RNG seed");
    ver->add_flag("--no-sim", no_sim, "skip the Monte Carlo cross-check");
    ver->add_option("--perturb-boundaries", perturb,
                    "test hook: scale yalpha by this factor before checking");
    ver->add_option("--out", ver_out.path, "output file");
    bool ver_failed = false;
    ver->callback([&] {
        const MarketParams p = ver_ps.load();
        VerifyOptions opt;
        opt.sim_paths = ver_budget;
        opt.seed = ver_seed;
        opt.with_simulation = !no_sim;
        VerificationReport rep;
        if (perturb != 1.0) {
            const GammaRoots roots = compute_gammas(p);
            FreeBoundaries fb = compute_boundaries(roots, solve_y1alpha(roots, p.alpha), p);
            fb.yalpha *= perturb;
            fb.y1alpha = fb.y1 / fb.yalpha;
            rep = full_report(DualFunction(p, roots, fb), opt);
        } else {
            rep = full_report(p, opt);
        }
        std::ofstream f;
        auto& os = ver_out.stream(f);
        os << rep.to_json().dump(2) << "\n";
        ver_failed = !rep.pass;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return ver_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

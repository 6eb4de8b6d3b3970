// csum: compound-sum distributions, approximations, and simulation checks.
#include "csum/config.hpp"
#include "csum/errors.hpp"
#include "csum/exact.hpp"
#include "csum/modular.hpp"
#include "csum/montecarlo.hpp"
#include "csum/renewal.hpp"
#include "csum/ruin.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace {

using namespace csum;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Grid {
    double lo = 0, hi = 0;
    int steps = 1;
    std::vector<double> values() const {
        std::vector<double> v;
        if (steps == 1) { v.push_back(lo); return v; }
        for (int i = 0; i < steps; ++i)
            v.push_back(lo + (hi - lo) * i / (steps - 1));
        return v;
    }
};

// "v" or "lo:hi:steps"
Grid parse_grid(const std::string& s) {
    Grid g;
    const auto c1 = s.find(':');
    if (c1 == std::string::npos) {
        g.lo = g.hi = std::stod(s);
        g.steps = 1;
        return g;
    }
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw ConfigError("bad grid '" + s + "', expected lo:hi:steps");
    g.lo = std::stod(s.substr(0, c1));
    g.hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    g.steps = std::stoi(s.substr(c2 + 1));
    if (g.steps < 2 || !(g.lo < g.hi))
        throw ConfigError("bad grid '" + s + "': need lo < hi and steps >= 2");
    return g;
}

struct Out {
    std::unique_ptr<std::ofstream> file;
    std::ostream* os = &std::cout;
    explicit Out(const std::string& path) {
        if (!path.empty()) {
            file = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file) throw ConfigError("cannot open output file '" + path + "'");
            os = file.get();
        }
    }
    std::ostream& stream() { return *os; }
};

void write_preamble(std::ostream& os, std::uint64_t hash, std::uint64_t seed) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "# config_hash=0x%016llx seed=%llu\n",
                  (unsigned long long)hash, (unsigned long long)seed);
    os << buf;
}

ExpModel exp_model_from(const BasisSpec& b, double level) {
    const RiskBasis& r = as_risk(b);
    const auto* xe = std::get_if<Exponential>(&r.x_dist);
    const auto* ye = std::get_if<Exponential>(&r.y_dist);
    if (!xe || !ye)
        throw ModelError("exact formulas require exponential X and Y components");
    return ExpModel{xe->rate, ye->rate, r.premium_c, level};
}

// ---------------------------------------------------------------------------

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 1;
    std::uint64_t paths = 100000;
    std::uint64_t cap = 1000000;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_config = true) {
    auto* c = cmd->add_option("--config", o.config_path, "model config file");
    if (need_config) c->required();
    cmd->add_option("--out", o.out_path, "output CSV path (default stdout)");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--paths", o.paths, "number of simulated paths");
    cmd->add_option("--cap", o.cap, "per-path step cap");
    cmd->add_option("--workers", o.workers, "worker threads (0 = all)");
}

int run_exact(const CommonOpts& o, double level, const std::string& horizon) {
    const ParsedConfig cfg = load_config(o.config_path);
    const ExpModel m = exp_model_from(config_basis(cfg), level);
    Out out(o.out_path);
    write_preamble(out.stream(), cfg.hash, o.seed);
    out.stream() << "c,level,horizon,exact,defect\n";
    for (double x : parse_grid(horizon).values())
        out.stream() << fmt(m.c) << ',' << fmt(level) << ',' << fmt(x) << ','
                     << fmt(exact_cdf(m, x)) << ',' << fmt(defect_mass(m)) << '\n';
    return 0;
}

int run_approx(const CommonOpts& o, const std::string& method, double level,
               const std::string& xgrid) {
    const ParsedConfig cfg = load_config(o.config_path);
    const BasisSpec& b = config_basis(cfg);
    Out out(o.out_path);
    write_preamble(out.stream(), cfg.hash, o.seed);
    const auto xs = parse_grid(xgrid).values();

    if (method == "normal" && std::holds_alternative<RiskBasis>(b)) {
        const NormalApproxParams p = normal_params(b);
        out.stream() << "# m_down=" << fmt(p.m_down) << " d_down_sq=" << fmt(p.d_down_sq) << '\n';
        out.stream() << "level,x,normal\n";
        for (double x : xs)
            out.stream() << fmt(level) << ',' << fmt(x) << ','
                         << fmt(proper_cdf_normal(p, level, x)) << '\n';
    } else if (method == "qnormal") {
        const QuasiNormalParams p = quasi_normal_params(b, SpitzerConfig{200, o.paths, o.seed});
        out.stream() << "# kappa=" << fmt(p.kappa) << " cramer_c=" << fmt(p.cramer_c)
                     << " m_up=" << fmt(p.m_up) << " d_up_sq=" << fmt(p.d_up_sq)
                     << (p.cramer_from_spitzer ? " (spitzer)" : " (closed form)") << '\n';
        out.stream() << "level,x,qnormal\n";
        for (double x : xs)
            out.stream() << fmt(level) << ',' << fmt(x) << ','
                         << fmt(quasi_normal_cdf(p, level, x)) << '\n';
    } else if (method == "ig") {
        const InverseGaussianParams p = inverse_gaussian_params(b, level);
        out.stream() << "# M=" << fmt(p.m) << " D_sq=" << fmt(p.d_sq)
                     << " lambda=" << fmt(p.lambda()) << " inv_mu=" << fmt(p.inv_mu()) << '\n';
        out.stream() << "level,x,ig\n";
        for (double x : xs)
            out.stream() << fmt(level) << ',' << fmt(x) << ','
                         << fmt(inverse_gaussian_cdf_approx(p, x)) << '\n';
    } else if (method == "normal" || method == "edgeworth") {
        // cumulated rewards of a direct basis; level is the horizon t
        const MomentSet mom = moments(b);
        const RewardApproxParams p = reward_params(mom);
        if (method == "normal") {
            out.stream() << "# m_s=" << fmt(p.m_s) << " sigma_s_sq=" << fmt(p.sigma_s_sq) << '\n';
            out.stream() << "t,x,normal,std_x\n";
            for (double x : xs)
                out.stream() << fmt(level) << ',' << fmt(x) << ','
                             << fmt(cumulated_rewards_cdf_normal(p, level, x)) << ','
                             << fmt(standardize_reward(p, level, x)) << '\n';
        } else {
            const EdgeworthQ1 q = edgeworth_q1(mom);
            out.stream() << "# m_s=" << fmt(p.m_s) << " sigma_s_sq=" << fmt(p.sigma_s_sq)
                         << " kappa30=" << fmt(q.kappa30) << " i1=" << fmt(q.i1) << '\n';
            out.stream() << "t,x,edgeworth,normal,std_x\n";
            for (double x : xs)
                out.stream() << fmt(level) << ',' << fmt(x) << ','
                             << fmt(cumulated_rewards_cdf_edgeworth(p, q, level, x)) << ','
                             << fmt(cumulated_rewards_cdf_normal(p, level, x)) << ','
                             << fmt(standardize_reward(p, level, x)) << '\n';
        }
    } else {
        throw ConfigError("unknown method '" + method +
                          "' (normal | qnormal | ig | edgeworth)");
    }
    return 0;
}

int run_simulate(const CommonOpts& o, double level) {
    const ParsedConfig cfg = load_config(o.config_path);
    const BasisSpec& b = config_basis(cfg);
    SimConfig sc{o.paths, o.seed, o.cap, o.workers};
    const auto outcomes = simulate_paths(b, level, sc);
    const CrossingSummary s = crossing_summary(outcomes);
    Out out(o.out_path);
    write_preamble(out.stream(), cfg.hash, o.seed);
    out.stream() << "# level=" << fmt(level) << " paths=" << s.n_paths
                 << " crossed=" << s.n_crossed << " fraction=" << fmt(s.fraction)
                 << " se=" << fmt(s.std_error)
                 << " cap_censored_fraction=" << fmt((double)s.n_capped / (double)s.n_paths)
                 << '\n';
    write_outcomes_csv(out.stream(), outcomes);
    return 0;
}

int run_sweep(const CommonOpts& o, const std::string& cgrid, double level,
              double horizon, const std::string& methods_csv) {
    const ParsedConfig cfg = load_config(o.config_path);
    const RiskBasis base = as_risk(config_basis(cfg));
    std::vector<std::string> methods;
    {
        std::istringstream in(methods_csv);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            if (tok == "exact" || tok == "ig" || tok == "normal" || tok == "qnormal" ||
                tok == "simulate")
                methods.push_back(tok);
            else if (tok == "edgeworth")
                throw ConfigError("edgeworth applies to regular summation only; "
                                  "a premium sweep needs the risk form");
            else
                throw ConfigError("unknown sweep method '" + tok + "'");
        }
        if (methods.empty()) throw ConfigError("no sweep methods given");
    }

    Out out(o.out_path);
    write_preamble(out.stream(), cfg.hash, o.seed);
    out.stream() << "# level=" << fmt(level) << " horizon=" << fmt(horizon) << '\n';
    out.stream() << "c";
    for (const auto& m : methods) out.stream() << ',' << m;
    out.stream() << '\n';

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double c : parse_grid(cgrid).values()) {
        RiskBasis rb = base;
        rb.premium_c = c;
        const BasisSpec b{rb};
        const double cstar = critical_premium(b);
        out.stream() << fmt(c);
        for (const auto& m : methods) {
            double v = nan;
            if (m == "exact") {
                v = exact_cdf(exp_model_from(b, level), horizon);
            } else if (m == "ig") {
                v = inverse_gaussian_cdf_approx(inverse_gaussian_params(b, level), horizon);
            } else if (m == "normal") {
                if (c < cstar) v = proper_cdf_normal(normal_params(b), level, horizon);
            } else if (m == "qnormal") {
                if (c > cstar)
                    v = quasi_normal_cdf(quasi_normal_params(b, SpitzerConfig{200, o.paths, o.seed}),
                                         level, horizon);
            } else { // simulate
                SimConfig sc{o.paths, o.seed, o.cap, o.workers};
                const auto outcomes = simulate_paths(b, level, sc);
                std::uint64_t hits = 0;
                for (const auto& p : outcomes)
                    if (p.crossed && p.s_at_inf <= horizon) ++hits;
                v = (double)hits / (double)outcomes.size();
            }
            out.stream() << ',' << fmt(v);
        }
        out.stream() << '\n';
    }
    return 0;
}

int run_renewal(const CommonOpts& o, double t) {
    const ParsedConfig cfg = load_config(o.config_path);
    const BasisSpec& b = config_basis(cfg);
    const DirectBasis& d = as_direct(b);
    (void)d;
    const MomentSet mom = moments(b);

    double sim_mean = std::numeric_limits<double>::quiet_NaN(), sim_se = sim_mean;
    if (o.paths > 0) {
        SimConfig sc{o.paths, o.seed, o.cap, o.workers};
        const auto outcomes = simulate_paths(b, t, sc);
        double s1 = 0, s2 = 0;
        for (const auto& p : outcomes) {
            const double n_sup = p.crossed ? (double)(p.n_inf - 1) : (double)o.cap;
            s1 += n_sup;
            s2 += n_sup * n_sup;
        }
        sim_mean = s1 / (double)outcomes.size();
        sim_se = std::sqrt((s2 / (double)outcomes.size() - sim_mean * sim_mean) /
                           (double)outcomes.size());
    }
    Out out(o.out_path);
    write_preamble(out.stream(), cfg.hash, o.seed);
    out.stream() << "t,elementary,refined,simulated_mean,simulated_se\n";
    out.stream() << fmt(t) << ',' << fmt(renewal_mean_elementary(mom.mu_T, t)) << ','
                 << fmt(renewal_mean_refined(mom, t)) << ',' << fmt(sim_mean) << ','
                 << fmt(sim_se) << '\n';
    return 0;
}

int run_garbage(const CommonOpts& o, double t, const std::string& prefix) {
    BasisSpec b = DirectBasis{Exponential{1.0}, Exponential{1.0}, Ordinary{}};
    std::uint64_t hash = fnv1a_hash("builtin: T=exp(1) X=exp(1)");
    if (!o.config_path.empty()) {
        const ParsedConfig cfg = load_config(o.config_path);
        b = config_basis(cfg);
        hash = cfg.hash;
    }
    SimConfig sc{o.paths, o.seed, o.cap, o.workers};
    auto sample = simulate_garbage(b, t, sc);
    const EmpiricalCdf ecdf = EmpiricalCdf::from_samples(std::move(sample));

    {
        Out out(prefix + "_sample.csv");
        write_preamble(out.stream(), hash, o.seed);
        out.stream() << "x,ecdf\n";
        const auto& v = ecdf.sorted_values();
        for (std::size_t i = 0; i < v.size(); ++i)
            out.stream() << fmt(v[i]) << ',' << fmt((double)(i + 1) / (double)v.size()) << '\n';
    }
    {
        Out out(prefix + "_limit.csv");
        write_preamble(out.stream(), hash, o.seed);
        out.stream() << "x,cdf,pdf\n";
        for (int i = -200; i <= 200; ++i) {
            const double x = i * 0.02;
            out.stream() << fmt(x) << ',' << fmt(garbage_limit_cdf(x)) << ','
                         << fmt(garbage_limit_pdf(x)) << '\n';
        }
    }
    std::cerr << "wrote " << prefix << "_sample.csv and " << prefix << "_limit.csv\n";
    return 0;
}

int run_modular(const CommonOpts& o, std::uint64_t n_blocks, double t) {
    const ParsedConfig cfg = load_config(o.config_path);
    const MarkovModulatedBasis& m = config_modulated(cfg);
    Rng rng(o.seed);
    const BlockStats stats = extract_blocks(m, n_blocks, rng, o.cap);
    const ModularCltParams clt = modular_clt_params(stats);
    const auto pi = stationary_distribution(m);

    Out out(o.out_path);
    write_preamble(out.stream(), cfg.hash, o.seed);
    out.stream() << "key,value\n";
    out.stream() << "n_blocks," << stats.n_blocks << '\n';
    out.stream() << "mu_tau," << fmt(stats.mu_tau) << '\n';
    out.stream() << "kac_return_time," << fmt(1.0 / pi[(std::size_t)m.reference_state]) << '\n';
    out.stream() << "mu_T," << fmt(stats.mu_t) << '\n';
    out.stream() << "mu_X," << fmt(stats.mu_x) << '\n';
    out.stream() << "det_q," << fmt(stats.det_q) << '\n';
    out.stream() << "lag1_corr_T," << fmt(stats.lag1_corr_t) << '\n';
    out.stream() << "lag1_corr_X," << fmt(stats.lag1_corr_x) << '\n';
    out.stream() << "m_s," << fmt(clt.params.m_s) << '\n';
    out.stream() << "se_m_s," << fmt(clt.se_m_s) << '\n';
    out.stream() << "sigma_s_sq," << fmt(clt.params.sigma_s_sq) << '\n';
    out.stream() << "se_sigma_s_sq," << fmt(clt.se_sigma_s_sq) << '\n';

    if (t > 0.0 && o.paths > 0) {
        std::vector<double> zs(o.paths);
        for (std::uint64_t i = 0; i < o.paths; ++i) {
            Rng prng = Rng::for_path(o.seed + 1, i);
            const double s = simulate_modulated_sum(m, t, o.cap, prng);
            zs[i] = standardize_reward(clt.params, t, s);
        }
        const EmpiricalCdf e = EmpiricalCdf::from_samples(std::move(zs));
        const double d = sup_distance(e, [](double x) { return std_normal_cdf(x); });
        out.stream() << "clt_t," << fmt(t) << '\n';
        out.stream() << "clt_paths," << o.paths << '\n';
        out.stream() << "clt_sup_distance," << fmt(d) << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compound sums: exact laws, approximations, simulation"};
    app.require_subcommand(1);

    CommonOpts o;
    double level = 0, horizon = 0, t = 0;
    std::string horizon_grid, xgrid, cgrid, methods, method, prefix = "garbage";
    std::uint64_t n_blocks = 1000000;

    auto* c_exact = app.add_subcommand("exact", "exact CDF of the exponential risk model");
    add_common(c_exact, o);
    c_exact->add_option("--level", level, "crossing level (initial capital)")->required();
    c_exact->add_option("--horizon", horizon_grid, "horizon x or grid lo:hi:steps")->required();

    auto* c_approx = app.add_subcommand("approx", "analytic approximations");
    add_common(c_approx, o);
    c_approx->add_option("--method", method, "normal | qnormal | ig | edgeworth")->required();
    c_approx->add_option("--level,--t", level, "crossing level / horizon t")->required();
    c_approx->add_option("--x", xgrid, "evaluation point or grid lo:hi:steps")->required();

    auto* c_sim = app.add_subcommand("simulate", "path simulation dump");
    add_common(c_sim, o);
    c_sim->add_option("--level", level, "crossing level")->required();

    auto* c_sweep = app.add_subcommand("sweep", "premium sweep across methods");
    add_common(c_sweep, o);
    c_sweep->add_option("--c", cgrid, "premium grid lo:hi:steps")->required();
    c_sweep->add_option("--level", level, "crossing level")->required();
    c_sweep->add_option("--horizon", horizon, "horizon x")->required();
    c_sweep->add_option("--methods", methods, "comma list: exact,ig,normal,qnormal,simulate")
        ->required();

    auto* c_renewal = app.add_subcommand("renewal", "expected renewal counts");
    add_common(c_renewal, o);
    c_renewal->add_option("--t", t, "horizon t")->required();

    auto* c_garbage = app.add_subcommand("garbage", "garbage-term sample and limit law");
    add_common(c_garbage, o, /*need_config=*/false);
    c_garbage->add_option("--t", t, "horizon t")->required();
    c_garbage->add_option("--prefix", prefix, "output file prefix");

    auto* c_mod = app.add_subcommand("modular", "regeneration-block analysis");
    add_common(c_mod, o);
    c_mod->add_option("--blocks", n_blocks, "number of stationary blocks");
    c_mod->add_option("--t", t, "optional CLT horizon");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_exact->parsed()) return run_exact(o, level, horizon_grid);
        if (c_approx->parsed()) return run_approx(o, method, level, xgrid);
        if (c_sim->parsed()) return run_simulate(o, level);
        if (c_sweep->parsed()) return run_sweep(o, cgrid, level, horizon, methods);
        if (c_renewal->parsed()) return run_renewal(o, t);
        if (c_garbage->parsed()) return run_garbage(o, t, prefix);
        if (c_mod->parsed()) return run_modular(o, n_blocks, c_mod->count("--t") ? t : 0.0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

// Command-line front end: exponent computation, R/D sweeps, verification
// suites, and finite-n simulation, all emitting CSV on stdout.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcexp/channel.hpp"
#include "rcexp/e0.hpp"
#include "rcexp/finite_n.hpp"
#include "rcexp/optim.hpp"
#include "rcexp/problem_io.hpp"
#include "rcexp/rate.hpp"
#include "rcexp/source_exponents.hpp"

namespace {

using namespace rcexp;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitParseError = 2;
constexpr int kExitScaleExceeded = 3;

std::string format_value(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::vector<double> parse_grid(const std::string& s) {
    double a, b, step;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0.0)
        throw ParseError("grid '" + s + "' must be a:b:step with step > 0");
    std::vector<double> g;
    for (double v = a; v <= b + 1e-12; v += step) g.push_back(v);
    if (g.empty()) throw ParseError("grid '" + s + "' is empty");
    return g;
}

std::vector<double> grid_from(const std::optional<SweepRange>& r) {
    if (!r) throw ParseError("no sweep range given (flag or problem file)");
    std::vector<double> g;
    for (double v = r->from; v <= r->to + 1e-12; v += r->step) g.push_back(v);
    return g;
}

struct Computed {
    double value;
    const char* method;
};

const std::vector<std::string> kQuantities = {
    "es",         "ef",          "ef_lce",    "ee",           "ec_star", "ec_star_lce",
    "ml_correct", "dueck_korner", "forney_ee", "forney_exact", "forney_bound",
    "gallager",   "rate",        "rate_max",  "mutual_info",  "dmin_q"};

bool needs_channel(const std::string& q) {
    return q != "es" && q != "ef" && q != "ef_lce" && q != "rate" && q != "rate_max";
}

Computed compute_quantity(const ProblemFile& file, const std::string& q, double R, double D,
                          double grid) {
    if (needs_channel(q)) {
        if (!std::holds_alternative<ChannelProblem>(file.problem))
            throw ParseError("quantity '" + q + "' requires a channel problem file");
        const ChannelProblem cp = file.channel().with_threshold(D);
        if (q == "ee") return {ee(cp, R), "explicit"};
        if (q == "ec_star") return {ec_star_implicit(cp, R, grid).value(), "implicit-grid"};
        if (q == "ec_star_lce") return {ec_star_lce(cp, R), "explicit-lce"};
        if (q == "ml_correct") return {ml_correct_exponent(cp, R), "explicit"};
        if (q == "dueck_korner") return {dueck_korner_bound(cp, R, grid), "implicit-grid"};
        if (q == "forney_ee") return {forney_ee(cp, R), "explicit"};
        if (q == "forney_exact") {
            ForneyExactResult f = forney_exact(cp, R);
            if (f.exceptional)
                std::cerr << "warning: (R, D) is an excluded point of the exact tradeoff "
                             "exponent (R = -D or D = Dmin(Q))\n";
            return {f.value.value(), "explicit"};
        }
        if (q == "forney_bound") return {forney_bound(cp, R), "explicit"};
        if (q == "gallager") return {gallager_er(cp, R), "explicit"};
        if (q == "mutual_info") return {mutual_information(cp), "direct"};
        if (q == "dmin_q") return {dmin_q(cp), "direct"};
        throw ParseError("unknown quantity '" + q + "'");
    }
    SourceProblem sp = file.is_source()
                           ? file.source().with_threshold(D)
                           : compile(file.channel().with_threshold(D)).composite;
    if (q == "rate") return {rate(sp.P, sp.Q, sp.d, sp.D).rate.value(), "dual"};
    if (q == "rate_max") return {rate_max(sp.Q, sp.d, sp.D).value(), "grid-ascent"};
    if (q == "es") return {es_explicit(sp, R), "explicit"};
    if (q == "ef") return {ef_implicit(sp, R, grid).value(), "implicit-grid"};
    if (q == "ef_lce") return {ef_explicit_lce(sp, R), "explicit-lce"};
    throw ParseError("unknown quantity '" + q + "'");
}

void print_header() { std::cout << "quantity,R,D,value,method,wall_time_s\n"; }

void print_row(const std::string& q, double R, double D, const Computed& c, double secs) {
    std::cout << q << ',' << format_value(R) << ',' << format_value(D) << ','
              << format_value(c.value) << ',' << c.method << ',' << format_value(secs) << '\n';
}

// ---------------------------------------------------------------------------
// verify suites

uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Rng {
    uint64_t state;
    double uniform() {
        state = splitmix64(state);
        return (state >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

Distribution random_distribution(Rng& rng, std::size_t n, double floor_w = 0.02) {
    std::vector<double> w(n);
    double s = 0;
    for (double& v : w) { v = floor_w + rng.uniform(); s += v; }
    for (double& v : w) v /= s;
    return Distribution(std::move(w));
}

ChannelProblem random_channel(Rng& rng, std::size_t nx, std::size_t ny, double D) {
    std::vector<Distribution> rows;
    for (std::size_t x = 0; x < nx; ++x) rows.push_back(random_distribution(rng, ny, 0.05));
    return ChannelProblem(random_distribution(rng, nx, 0.05), ConditionalDistribution(rows), D);
}

struct VerifyReport {
    int failures = 0;
    void check(const std::string& name, bool ok, double deviation) {
        std::cout << (ok ? "PASS" : "FAIL") << ' ' << name << " deviation=" << format_value(deviation)
                  << '\n';
        if (!ok) ++failures;
    }
};

void suite_duality(VerifyReport& rep, Rng& rng) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        ChannelProblem cp = random_channel(rng, 2 + (i % 2), 2 + (i % 3) % 2, rng.uniform(-0.3, 0.5));
        SourceProblem composite = compile(cp).composite;
        for (int j = 0; j < 5; ++j) {
            const double s = rng.uniform(0.0, 3.0);
            const double rho = rng.uniform(-2.0, 2.0);
            worst = std::max(worst, std::abs(e0_channel(s, rho, cp) - e0(s, rho, composite)));
        }
    }
    rep.check("duality.e0_channel_vs_compiled", worst <= 1e-12, worst);
}

void suite_thm1(VerifyReport& rep, Rng& rng) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        Distribution P = random_distribution(rng, 2), Q = random_distribution(rng, 2);
        std::vector<std::vector<double>> d(2, std::vector<double>(2));
        for (auto& row : d)
            for (double& v : row) v = rng.uniform();
        DistortionSpec spec(d);
        SourceProblem sp(P, Q, spec, rng.uniform(spec.min_value() + 0.02, spec.max_value()));
        const double rp = rate(P, Q, spec, sp.D).rate.value();
        if (!std::isfinite(rp)) continue;
        const double R = rng.uniform(0.0, 1.2 * std::max(rp, 1e-3));
        worst = std::max(worst, std::abs(es_explicit(sp, R) - es_implicit(sp, R, 1e-3)));
    }
    rep.check("thm1.explicit_vs_implicit", worst <= 1e-3, worst);
}

void suite_thm3(VerifyReport& rep, Rng&) {
    SourceProblem sp(Distribution({0.8, 0.2}), Distribution({0.5, 0.5}),
                     DistortionSpec({{0.0, 1.0}, {1.0, 0.0}}), 0.25);
    const double rmax = rate_max(sp.Q, sp.d, sp.D).value();
    std::vector<double> rates;
    std::vector<ExtReal> values;
    for (int i = 0; i <= 100; ++i) {
        const double R = 1e-3 + i * (rmax + 0.05) / 100.0;
        rates.push_back(R);
        values.push_back(ef_implicit(sp, R, 1e-3));
    }
    ExponentCurve lce = lower_convex_envelope(ExponentCurve(rates, values));
    double worst = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (lce.values[i].is_inf()) continue;
        worst = std::max(worst, std::abs(ef_explicit_lce(sp, rates[i]) - lce.values[i].value()));
    }
    rep.check("thm3.envelope_match", worst <= 2e-3, worst);
}

void suite_lemma1(VerifyReport& rep, Rng& rng) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        for (double D : {0.0, 0.1, 0.5}) {
            ChannelProblem cp = random_channel(rng, 2, 2, D);
            const double R = rng.uniform(0.0, 0.6);
            worst = std::max(worst, std::abs(ee(cp, R) - forney_bound(cp, R)));
        }
    }
    rep.check("lemma1.ee_equals_forney_bound", worst <= 1e-6, worst);
}

void suite_ml_chain(VerifyReport& rep, Rng& rng) {
    double worst = 0.0, dk_worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        ChannelProblem cp = random_channel(rng, 2, 2, 0.0);
        const double R = mutual_information(cp) + rng.uniform(0.05, 0.4);
        const double expl = ml_correct_exponent(cp, R);
        const double imp_t = ml_correct_implicit_t(cp, R, 1e-2);
        const double imp_uw = ml_correct_implicit_uw(cp, R, 1e-2);
        worst = std::max({worst, std::abs(expl - imp_t), std::abs(expl - imp_uw)});
        dk_worst = std::max(dk_worst, expl - dueck_korner_bound(cp, R, 1e-2));
    }
    rep.check("ml_chain.three_forms_agree", worst <= 2e-3, worst);
    rep.check("ml_chain.dueck_korner_upper_bounds", dk_worst <= 1e-6, dk_worst);
}

void suite_finite_n(VerifyReport& rep, Rng&, uint64_t seed) {
    SourceProblem sp(Distribution({0.8, 0.2}), Distribution({0.5, 0.5}),
                     DistortionSpec({{0.0, 1.0}, {1.0, 0.0}},
                                    {{Rational{0, 1}, Rational{1, 1}},
                                     {Rational{1, 1}, Rational{0, 1}}}),
                     0.25);
    CodebookSpec cb = CodebookSpec::source(16, 0.08);
    const double ps = exact_success_prob(sp, cb).probability();
    const double pf = exact_failure_prob(sp, cb).probability();
    rep.check("finite_n.success_plus_failure", std::abs(ps + pf - 1.0) <= 1e-12,
              std::abs(ps + pf - 1.0));

    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    CodebookSpec cbc = CodebookSpec::channel(8, 0.2);
    const double exact = exact_channel_error_prob(bsc, cbc).probability();
    ExactProbability mc = mc_simulate(bsc, cbc, DecoderKind::simplified, 100000, seed);
    WilsonInterval w = wilson_interval(*mc.errors, *mc.trials, 3.0);
    rep.check("finite_n.mc_within_3se_of_exact", exact >= w.lo && exact <= w.hi,
              std::abs(exact - mc.probability()));
}

int run_verify(const std::string& suite, uint64_t seed) {
    VerifyReport rep;
    Rng rng{splitmix64(seed ^ 0xabcdef12345678ULL)};
    const bool all = suite == "all";
    if (all || suite == "duality") suite_duality(rep, rng);
    if (all || suite == "thm1") suite_thm1(rep, rng);
    if (all || suite == "thm3") suite_thm3(rep, rng);
    if (all || suite == "lemma1") suite_lemma1(rep, rng);
    if (all || suite == "ml_chain") suite_ml_chain(rep, rng);
    if (all || suite == "finite_n") suite_finite_n(rep, rng, seed);
    return rep.failures == 0 ? 0 : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-coding exponents for lossy source and channel coding"};
    app.require_subcommand(1);

    int jobs = 0;
    app.add_option("--jobs", jobs, "worker threads (default: RCEXP_JOBS or hardware)");

    // exponent
    auto* cmd_exp = app.add_subcommand("exponent", "compute one exponent at (R, D)");
    std::string exp_file, exp_quantity;
    double exp_rate = 0.0, exp_grid = 1e-3;
    std::optional<double> exp_threshold;
    cmd_exp->add_option("file", exp_file, "problem JSON file")->required();
    cmd_exp->add_option("--quantity", exp_quantity, "quantity name")->required();
    cmd_exp->add_option("--rate", exp_rate, "rate R in nats");
    cmd_exp->add_option("--threshold", exp_threshold, "override threshold D");
    cmd_exp->add_option("--grid", exp_grid, "grid resolution for implicit quantities");

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "Cartesian (R, D) sweep");
    std::string sw_file, sw_quantity, sw_rates, sw_thresholds;
    double sw_grid = 1e-2;
    cmd_sweep->add_option("file", sw_file, "problem JSON file")->required();
    cmd_sweep->add_option("--quantity", sw_quantity, "quantity name")->required();
    cmd_sweep->add_option("--rates", sw_rates, "rate grid a:b:step");
    cmd_sweep->add_option("--thresholds", sw_thresholds, "threshold grid a:b:step");
    cmd_sweep->add_option("--grid", sw_grid, "grid resolution for implicit quantities");
    cmd_sweep->add_option("--jobs", jobs, "worker threads");

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "run a verification suite");
    std::string vf_suite = "all";
    uint64_t vf_seed = 1;
    cmd_verify->add_option("--suite", vf_suite, "duality|thm1|thm3|lemma1|ml_chain|finite_n|all")
        ->check(CLI::IsMember({"duality", "thm1", "thm3", "lemma1", "ml_chain", "finite_n", "all"}));
    cmd_verify->add_option("--seed", vf_seed, "random seed");

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo decoder simulation");
    std::string sim_file, sim_decoder;
    int sim_n = 8;
    double sim_rate = 0.1;
    uint64_t sim_trials = 100000, sim_seed = 1;
    cmd_sim->add_option("file", sim_file, "channel problem JSON file")->required();
    cmd_sim->add_option("--decoder", sim_decoder, "simplified|optimum")
        ->required()
        ->check(CLI::IsMember({"simplified", "optimum"}));
    cmd_sim->add_option("--n", sim_n, "blocklength")->required();
    cmd_sim->add_option("--rate", sim_rate, "rate R in nats")->required();
    cmd_sim->add_option("--trials", sim_trials, "Monte Carlo trials")->required();
    cmd_sim->add_option("--seed", sim_seed, "RNG seed")->required();

    CLI11_PARSE(app, argc, argv);
    if (jobs > 0) set_num_threads(jobs);

    try {
        if (cmd_exp->parsed()) {
            ProblemFile file = load_problem(exp_file);
            const double D = exp_threshold.value_or(
                file.is_source() ? file.source().D : file.channel().D);
            const auto t0 = std::chrono::steady_clock::now();
            Computed c = compute_quantity(file, exp_quantity, exp_rate, D, exp_grid);
            const double secs = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
            print_header();
            print_row(exp_quantity, exp_rate, D, c, secs);
            return 0;
        }
        if (cmd_sweep->parsed()) {
            ProblemFile file = load_problem(sw_file);
            std::vector<double> rates =
                sw_rates.empty() ? grid_from(file.rates) : parse_grid(sw_rates);
            std::vector<double> thresholds;
            if (!sw_thresholds.empty())
                thresholds = parse_grid(sw_thresholds);
            else if (file.thresholds)
                thresholds = grid_from(file.thresholds);
            else
                thresholds = {file.is_source() ? file.source().D : file.channel().D};
            print_header();
            // rows sorted by (D, R); deterministic regardless of parallelism
            for (double D : thresholds) {
                for (double R : rates) {
                    const auto t0 = std::chrono::steady_clock::now();
                    Computed c = compute_quantity(file, sw_quantity, R, D, sw_grid);
                    const double secs = std::chrono::duration<double>(
                                            std::chrono::steady_clock::now() - t0)
                                            .count();
                    print_row(sw_quantity, R, D, c, secs);
                }
            }
            return 0;
        }
        if (cmd_verify->parsed()) return run_verify(vf_suite, vf_seed);
        if (cmd_sim->parsed()) {
            ProblemFile file = load_problem(sim_file);
            if (file.is_source()) throw ParseError("simulate requires a channel problem file");
            const ChannelProblem& cp = file.channel();
            const CodebookSpec spec = CodebookSpec::channel(sim_n, sim_rate);
            const DecoderKind kind = sim_decoder == "simplified" ? DecoderKind::simplified
                                                                 : DecoderKind::optimum_tradeoff;
            ExactProbability est = mc_simulate(cp, spec, kind, sim_trials, sim_seed);
            std::string exact = "na", exact_exp = "na";
            if (kind == DecoderKind::simplified) {
                try {
                    ExactProbability ex = exact_channel_error_prob(cp, spec);
                    exact = format_value(ex.probability());
                    exact_exp = format_value(-ex.log_value / sim_n);
                } catch (const ScaleExceeded& e) {
                    std::cerr << "note: exact oracle out of scale (" << e.what()
                              << "); estimate only\n";
                }
            }
            std::cout << "n,R,decoder,trials,seed,estimate,ci_halfwidth_log,exact,"
                         "neg_log_rate_estimate,neg_log_rate_exact,rng\n";
            std::cout << sim_n << ',' << format_value(sim_rate) << ',' << sim_decoder << ','
                      << sim_trials << ',' << sim_seed << ',' << format_value(est.probability())
                      << ',' << format_value(est.ci_halfwidth.value_or(kInf)) << ',' << exact
                      << ',' << format_value(-est.log_value / sim_n) << ',' << exact_exp << ','
                      << *est.rng_algorithm << '\n';
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParseError;
    } catch (const ScaleExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitScaleExceeded;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParseError;
    }
    return 0;
}

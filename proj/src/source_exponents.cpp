#include "rcexp/source_exponents.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rcexp/e0.hpp"
#include "rcexp/optim.hpp"

namespace rcexp {

namespace {

constexpr double kSLimit = 1048576.0;    // 2^20
constexpr double kRhoLimit = 1048576.0;  // 2^20

int coarse_k_for(std::size_t dim, double grid_resolution) {
    if (dim <= 2) return static_cast<int>(std::min(1.0 / grid_resolution, 1000.0));
    if (dim == 3) return 100;
    if (dim == 4) return 40;
    if (dim <= 6) return 20;
    return 10;
}

// Normalize a lattice/polish point into a Distribution.
Distribution as_distribution(const std::vector<double>& t) {
    double s = 0;
    for (double v : t) s += v;
    std::vector<double> w(t);
    for (double& v : w) v /= s;
    return Distribution(std::move(w));
}

// inf_{s in [0, 2^20]} E0(s,-rho,Q,D): log-spaced scan then golden polish.
double inf_over_s_neg_rho(const SourceProblem& problem, double rho) {
    auto f = [&](double s) { return e0(s, -rho, problem); };
    double best_s = 0.0, best = f(0.0);
    double prev_s = 0.0;
    for (int j = -10; j <= 20; ++j) {
        const double s = std::pow(2.0, j);
        const double v = f(s);
        if (v < best) { best = v; best_s = s; }
        prev_s = s;
    }
    (void)prev_s;
    if (best_s >= kSLimit) return best;  // still descending at the limit
    const double lo = best_s == 0.0 ? 0.0 : best_s / 2.0;
    const double hi = best_s == 0.0 ? std::pow(2.0, -10) : best_s * 2.0;
    ScalarMaxResult r = golden_max([&](double s) { return -f(s); }, lo, hi, 1e-11);
    return std::min(best, -r.value);
}

}  // namespace

ExponentCurve::ExponentCurve(std::vector<double> rates_, std::vector<ExtReal> values_)
    : rates(std::move(rates_)), values(std::move(values_)) {
    if (rates.size() != values.size())
        throw std::invalid_argument("ExponentCurve: length mismatch");
    for (std::size_t i = 1; i < rates.size(); ++i)
        if (rates[i] <= rates[i - 1])
            throw std::invalid_argument("ExponentCurve: rates not strictly ascending");
}

double es_explicit(const SourceProblem& problem, double R) {
    if (R < 0.0) throw std::invalid_argument("es_explicit: R must be nonnegative");
    bool any_diverged = false;
    auto outer = [&](double rho) {
        // concave in s for rho in [0,1]
        ScalarMaxResult inner =
            grow_and_max([&](double s) { return e0(s, rho, problem); }, kSLimit, 1e-10);
        if (inner.diverged) any_diverged = true;
        return inner.value - rho * R;
    };
    ScalarMaxResult best = scan_and_max(outer, 0.0, 1.0, 41, 1e-9);
    if (any_diverged && best.value > 700.0) return kInf;
    return std::max(best.value, 0.0);
}

double es_implicit(const SourceProblem& problem, double R, double grid_resolution) {
    if (problem.P.size() > 4) throw ScaleExceeded("es_implicit: |X| > 4");
    auto f = [&](const std::vector<double>& t) -> double {
        Distribution T = as_distribution(t);
        const ExtReal div = kl_divergence(T, problem.P);
        if (div.is_inf()) return kInf;
        const ExtReal rt = rate(T, problem.Q, problem.d, problem.D).rate;
        if (rt.is_inf()) return kInf;  // |+inf - R|^+ = +inf
        return div.value() + std::max(rt.value() - R, 0.0);
    };
    SimplexMinResult r = minimize_on_simplex(f, problem.P.size(),
                                             coarse_k_for(problem.P.size(), grid_resolution),
                                             grid_resolution);
    return std::max(r.value, 0.0);
}

ExtReal ef_implicit(const SourceProblem& problem, double R, double grid_resolution) {
    return ef_implicit_limited(problem, R, grid_resolution, 4);
}

ExtReal ef_implicit_limited(const SourceProblem& problem, double R, double grid_resolution,
                            std::size_t alphabet_limit) {
    if (problem.P.size() > alphabet_limit) throw ScaleExceeded("ef_implicit: alphabet too large");
    const ExtReal rate_at_p = rate(problem.P, problem.Q, problem.d, problem.D).rate;
    if (ExtReal(std::max(R, 0.0)) <= rate_at_p) return ExtReal(0.0);

    const double slack = 1e-9;
    auto rate_of = [&](const std::vector<double>& t) {
        return rate(as_distribution(t), problem.Q, problem.d, problem.D).rate;
    };
    auto f = [&](const std::vector<double>& t) -> double {
        const ExtReal rt = rate_of(t);
        if (rt.is_finite() && rt.value() < R - slack) return kInf;
        const ExtReal div = kl_divergence(as_distribution(t), problem.P);
        return div.value();
    };
    const std::size_t dim = problem.P.size();
    const int k = coarse_k_for(dim, grid_resolution);
    SimplexMinResult r = minimize_on_simplex(f, dim, k, grid_resolution);
    // extra seed: the R_max maximizer, so a thin feasible region is not missed
    SimplexMinResult rm = minimize_on_simplex(
        [&](const std::vector<double>& t) { return -rate_of(t).value(); }, dim,
        dim <= 3 ? 50 : 20, 1e-6);
    if (-rm.value < R - slack) return ExtReal::infinity();  // R > R_max(D)
    SimplexMinResult seeded = polish_on_simplex(f, rm.point, 0.25, grid_resolution);
    const double best = std::min(r.value, seeded.value);
    if (std::isinf(best)) return ExtReal::infinity();
    return ExtReal(std::max(best, 0.0));
}

double ef_explicit_lce(const SourceProblem& problem, double R) {
    if (R < 0.0) throw std::invalid_argument("ef_explicit_lce: R must be nonnegative");
    // inner inf over s is concave in rho, so the outer sup is well-behaved
    auto outer = [&](double rho) { return inf_over_s_neg_rho(problem, rho) + rho * R; };
    ScalarMaxResult best = grow_and_max(outer, kRhoLimit, 1e-9);
    if (best.diverged) return kInf;
    return std::max(best.value, 0.0);
}

ExponentCurve lower_convex_envelope(const ExponentCurve& curve) {
    std::vector<std::size_t> finite;
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        if (curve.values[i].is_inf()) continue;
        finite.push_back(i);
    }
    if (finite.size() < 2)
        throw std::invalid_argument("lower_convex_envelope: fewer than 2 finite points");
    // +inf values must form a tail
    for (std::size_t i = 0; i + 1 < curve.values.size(); ++i)
        if (curve.values[i].is_inf() && !curve.values[i + 1].is_inf())
            throw std::invalid_argument("lower_convex_envelope: interior +inf");

    // lower hull of the finite points (monotone chain)
    std::vector<std::size_t> hull;
    for (std::size_t idx : finite) {
        const double x = curve.rates[idx], y = curve.values[idx].value();
        while (hull.size() >= 2) {
            const double x1 = curve.rates[hull[hull.size() - 2]];
            const double y1 = curve.values[hull[hull.size() - 2]].value();
            const double x2 = curve.rates[hull.back()];
            const double y2 = curve.values[hull.back()].value();
            if ((x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(idx);
    }

    std::vector<ExtReal> out(curve.values.size(), ExtReal(0.0));
    std::size_t seg = 0;
    for (std::size_t i = 0; i < curve.rates.size(); ++i) {
        if (curve.values[i].is_inf()) {
            out[i] = ExtReal::infinity();  // vertical constraint past the last finite rate
            continue;
        }
        const double x = curve.rates[i];
        while (seg + 1 < hull.size() && curve.rates[hull[seg + 1]] < x) ++seg;
        if (seg + 1 >= hull.size()) {
            out[i] = curve.values[hull.back()];
            continue;
        }
        const double x1 = curve.rates[hull[seg]], x2 = curve.rates[hull[seg + 1]];
        const double y1 = curve.values[hull[seg]].value(), y2 = curve.values[hull[seg + 1]].value();
        const double t = (x - x1) / (x2 - x1);
        out[i] = ExtReal(std::max(y1 + t * (y2 - y1), 0.0));
    }
    return ExponentCurve(curve.rates, std::move(out));
}

}  // namespace rcexp

#include "rcexp/rate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rcexp/optim.hpp"

namespace rcexp {

namespace {

constexpr double kSMaxLimit = 1099511627776.0;  // 2^40: constraint active at infinity
constexpr double kBoundaryTol = 1e-12;

// ln sum_{xh in supp(Q)} Q(xh) e^{-s d(x,xh)} per source row.
double row_log_moment(const Distribution& Q, const DistortionSpec& d, std::size_t x, double s) {
    double m = -kInf;
    for (std::size_t xh = 0; xh < Q.size(); ++xh)
        if (Q.in_support(xh)) m = std::max(m, std::log(Q[xh]) - s * d(x, xh));
    double sum = 0.0;
    for (std::size_t xh = 0; xh < Q.size(); ++xh)
        if (Q.in_support(xh)) sum += std::exp(std::log(Q[xh]) - s * d(x, xh) - m);
    return m + std::log(sum);
}

// E[d | x] under the tilted row W_s.
double row_tilted_mean(const Distribution& Q, const DistortionSpec& d, std::size_t x, double s) {
    const double lz = row_log_moment(Q, d, x, s);
    double mean = 0.0;
    for (std::size_t xh = 0; xh < Q.size(); ++xh)
        if (Q.in_support(xh)) mean += std::exp(std::log(Q[xh]) - s * d(x, xh) - lz) * d(x, xh);
    return mean;
}

// Dual derivative g'(s) = -D + sum_x T(x) E_{W_s}[d | x].
double dual_slope(const Distribution& T, const Distribution& Q, const DistortionSpec& d, double D,
                  double s) {
    double mean = 0.0;
    for (std::size_t x = 0; x < T.size(); ++x)
        if (T.in_support(x)) mean += T[x] * row_tilted_mean(Q, d, x, s);
    return mean - D;
}

double dual_value(const Distribution& T, const Distribution& Q, const DistortionSpec& d, double D,
                  double s) {
    double v = -s * D;
    for (std::size_t x = 0; x < T.size(); ++x)
        if (T.in_support(x)) v -= T[x] * row_log_moment(Q, d, x, s);
    return v;
}

ConditionalDistribution tilted_coupling(const Distribution& T, const Distribution& Q,
                                        const DistortionSpec& d, double s) {
    std::vector<Distribution> rows;
    rows.reserve(T.size());
    for (std::size_t x = 0; x < T.size(); ++x) {
        std::vector<double> w(Q.size(), 0.0);
        const double lz = row_log_moment(Q, d, x, s);
        for (std::size_t xh = 0; xh < Q.size(); ++xh)
            if (Q.in_support(xh)) w[xh] = std::exp(std::log(Q[xh]) - s * d(x, xh) - lz);
        double sum = 0.0;
        for (double v : w) sum += v;
        for (double& v : w) v /= sum;
        rows.emplace_back(std::move(w));
    }
    return ConditionalDistribution(std::move(rows));
}

// Limit value at D = min achievable: W restricted to row-argmin support,
// proportional to Q there; cost per row is ln(1 / Q{argmin set}).
RateResult boundary_rate(const Distribution& T, const Distribution& Q, const DistortionSpec& d) {
    double total = 0.0;
    std::vector<Distribution> rows;
    rows.reserve(T.size());
    for (std::size_t x = 0; x < T.size(); ++x) {
        double row_min = kInf;
        for (std::size_t xh = 0; xh < Q.size(); ++xh)
            if (Q.in_support(xh)) row_min = std::min(row_min, d(x, xh));
        double qa = 0.0;
        std::vector<double> w(Q.size(), 0.0);
        for (std::size_t xh = 0; xh < Q.size(); ++xh) {
            if (Q.in_support(xh) && d(x, xh) <= row_min + kBoundaryTol) {
                qa += Q[xh];
                w[xh] = Q[xh];
            }
        }
        for (double& v : w) v /= qa;
        rows.emplace_back(std::move(w));
        if (T.in_support(x)) total += T[x] * std::log(1.0 / qa);
    }
    RateResult r;
    r.rate = ExtReal(std::max(total, 0.0));
    r.w_star = ConditionalDistribution(std::move(rows));
    r.at_min_distortion_boundary = true;
    return r;
}

}  // namespace

RateResult rate(const Distribution& T, const Distribution& Q, const DistortionSpec& d, double D) {
    if (T.size() != d.num_source() || Q.size() != d.num_repro())
        throw std::invalid_argument("rate: dimension mismatch");

    const double dmin = min_achievable_distortion(T, Q, d);
    if (D < dmin - kBoundaryTol) {
        RateResult r;
        r.rate = ExtReal::infinity();
        return r;
    }
    if (D <= dmin + kBoundaryTol) return boundary_rate(T, Q, d);

    // Product coupling W(.|x) = Q feasible => rate 0.
    if (dual_slope(T, Q, d, D, 0.0) <= 0.0) {
        RateResult r;
        r.rate = ExtReal(0.0);
        r.s_star = 0.0;
        r.w_star = tilted_coupling(T, Q, d, 0.0);
        return r;
    }

    // g is concave with g'(0) > 0; grow the bracket until the slope flips.
    double hi = 1.0;
    while (dual_slope(T, Q, d, D, hi) > 0.0) {
        hi *= 2.0;
        if (hi >= kSMaxLimit) return boundary_rate(T, Q, d);
    }
    double lo = hi > 1.0 ? hi / 2.0 : 0.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (dual_slope(T, Q, d, D, mid) > 0.0 ? lo : hi) = mid;
    }
    const double s_star = 0.5 * (lo + hi);

    RateResult r;
    r.rate = ExtReal(std::max(dual_value(T, Q, d, D, s_star), 0.0));
    r.s_star = s_star;
    r.w_star = tilted_coupling(T, Q, d, s_star);
    return r;
}

ExtReal rate_primal_bruteforce(const Distribution& T, const Distribution& Q,
                               const DistortionSpec& d, double D, double grid_resolution) {
    const std::size_t nx = T.size(), nxh = Q.size();
    if (nx * nxh > 9) throw ScaleExceeded("rate_primal_bruteforce: |X|*|Xhat| > 9");
    if (min_achievable_distortion(T, Q, d) > D + kBoundaryTol) return ExtReal::infinity();

    auto coupling_cost = [&](const std::vector<std::vector<double>>& w) -> double {
        double div = 0.0, dist = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            if (!T.in_support(x)) continue;
            for (std::size_t xh = 0; xh < nxh; ++xh) {
                dist += T[x] * w[x][xh] * d(x, xh);
                if (w[x][xh] <= kSupportEps) continue;
                if (!Q.in_support(xh)) return kInf;
                div += T[x] * w[x][xh] * std::log(w[x][xh] / Q[xh]);
            }
        }
        return dist <= D + 1e-12 ? std::max(div, 0.0) : kInf;
    };

    // Feasible seed: each row fully on its distortion argmin within supp(Q).
    std::vector<std::vector<double>> best(nx, std::vector<double>(nxh, 0.0));
    for (std::size_t x = 0; x < nx; ++x) {
        std::size_t arg = 0;
        double m = kInf;
        for (std::size_t xh = 0; xh < nxh; ++xh)
            if (Q.in_support(xh) && d(x, xh) < m) { m = d(x, xh); arg = xh; }
        best[x][arg] = 1.0;
    }
    double best_val = coupling_cost(best);

    // Coarse product lattice over the rows.
    const int k0 = 4;
    const auto row_pts = compositions(k0, nxh);
    std::vector<std::size_t> idx(nx, 0);
    bool done = false;
    while (!done) {
        std::vector<std::vector<double>> w(nx, std::vector<double>(nxh));
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t xh = 0; xh < nxh; ++xh)
                w[x][xh] = static_cast<double>(row_pts[idx[x]][xh]) / k0;
        double v = coupling_cost(w);
        if (v < best_val) { best_val = v; best = w; }
        // odometer
        std::size_t pos = 0;
        while (pos < nx && ++idx[pos] == row_pts.size()) idx[pos++] = 0;
        done = pos == nx;
    }

    // Continuous coordinate-exchange descent. The divergence is convex along
    // every exchange direction and the distortion constraint is linear, so a
    // golden section over the feasibility-clipped step is exact per line.
    auto divergence_only = [&](const std::vector<std::vector<double>>& w) -> double {
        double div = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            if (!T.in_support(x)) continue;
            for (std::size_t xh = 0; xh < nxh; ++xh) {
                if (w[x][xh] <= kSupportEps) continue;
                if (!Q.in_support(xh)) return kInf;
                div += T[x] * w[x][xh] * std::log(w[x][xh] / Q[xh]);
            }
        }
        return std::max(div, 0.0);
    };
    auto distortion_of = [&](const std::vector<std::vector<double>>& w) -> double {
        double dist = 0.0;
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t xh = 0; xh < nxh; ++xh) dist += T[x] * w[x][xh] * d(x, xh);
        return dist;
    };
    best_val = divergence_only(best);

    // try a move of t along (row x1: +a1 -b1) plus t*lam along (row x2: +a2 -b2)
    auto try_direction = [&](std::size_t x1, std::size_t a1, std::size_t b1, std::size_t x2,
                             std::size_t a2, std::size_t b2, double lam, double g_per_t) -> bool {
        double lo = -best[x1][a1], hi = best[x1][b1];
        if (x2 != x1) {
            auto clip = [&](double coeff, double room_neg, double room_pos) {
                // coeff * t must stay within [-room_neg, room_pos]
                if (coeff > 0) {
                    lo = std::max(lo, -room_neg / coeff);
                    hi = std::min(hi, room_pos / coeff);
                } else if (coeff < 0) {
                    lo = std::max(lo, room_pos / coeff);
                    hi = std::min(hi, -room_neg / coeff);
                }
            };
            clip(lam, best[x2][a2], best[x2][b2]);
        }
        const double slack = D - distortion_of(best);
        if (g_per_t > 1e-300) hi = std::min(hi, slack / g_per_t);
        if (g_per_t < -1e-300) lo = std::max(lo, slack / g_per_t);
        if (hi - lo < 1e-12) return false;
        auto apply = [&](std::vector<std::vector<double>>& w, double t) {
            w[x1][a1] = std::max(w[x1][a1] + t, 0.0);
            w[x1][b1] = std::max(w[x1][b1] - t, 0.0);
            if (x2 != x1) {
                w[x2][a2] = std::max(w[x2][a2] + lam * t, 0.0);
                w[x2][b2] = std::max(w[x2][b2] - lam * t, 0.0);
            }
        };
        auto line = [&](double t) {
            auto cand = best;
            apply(cand, t);
            return -divergence_only(cand);
        };
        ScalarMaxResult r = golden_max(line, lo, hi, std::min(grid_resolution, 1e-6) * 1e-3);
        if (-r.value < best_val - 1e-13) {
            apply(best, r.x);
            best_val = -r.value;
            return true;
        }
        return false;
    };

    for (int round = 0; round < 200; ++round) {
        bool improved = false;
        // single-row exchanges, step clipped by the distortion budget
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t a = 0; a < nxh; ++a)
                for (std::size_t b = a + 1; b < nxh; ++b)
                    improved |= try_direction(x, a, b, x, a, b, 0.0, T[x] * (d(x, a) - d(x, b)));
        // distortion-neutral paired exchanges across two rows, for motion
        // along the active constraint boundary
        for (std::size_t x1 = 0; x1 < nx; ++x1)
            for (std::size_t x2 = 0; x2 < nx; ++x2) {
                if (x1 == x2) continue;
                for (std::size_t a1 = 0; a1 < nxh; ++a1)
                    for (std::size_t b1 = 0; b1 < nxh; ++b1) {
                        if (a1 == b1) continue;
                        const double g1 = T[x1] * (d(x1, a1) - d(x1, b1));
                        if (std::abs(g1) < 1e-14) continue;
                        for (std::size_t a2 = 0; a2 < nxh; ++a2)
                            for (std::size_t b2 = 0; b2 < nxh; ++b2) {
                                if (a2 == b2) continue;
                                const double g2 = T[x2] * (d(x2, a2) - d(x2, b2));
                                if (std::abs(g2) < 1e-14) continue;
                                improved |= try_direction(x1, a1, b1, x2, a2, b2, -g1 / g2, 0.0);
                            }
                    }
            }
        if (!improved) break;
    }
    return ExtReal(best_val);
}

ExtReal rate_max(const Distribution& Q, const DistortionSpec& d, double D) {
    const std::size_t nx = d.num_source();
    // dmin(T) is linear in T, so feasibility for all T reduces to the vertices.
    for (std::size_t x = 0; x < nx; ++x) {
        double row_min = kInf;
        for (std::size_t xh = 0; xh < Q.size(); ++xh)
            if (Q.in_support(xh)) row_min = std::min(row_min, d(x, xh));
        if (row_min > D + kBoundaryTol) return ExtReal::infinity();
    }
    auto neg_rate = [&](const std::vector<double>& t) -> double {
        double s = 0;
        for (double v : t) s += v;
        std::vector<double> tn(t);
        for (double& v : tn) v /= s;
        return -rate(Distribution(tn), Q, d, D).rate.value();
    };
    const int k = nx <= 3 ? 50 : 20;
    SimplexMinResult r = minimize_on_simplex(neg_rate, nx, k, 1e-6);
    return ExtReal(std::max(-r.value, 0.0));
}

}  // namespace rcexp

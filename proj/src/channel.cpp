#include "rcexp/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "rcexp/e0.hpp"
#include "rcexp/optim.hpp"

namespace rcexp {

namespace {

constexpr double kRhoLimit = 1048576.0;  // 2^20

uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit_double(uint64_t bits) { return (bits >> 11) * 0x1.0p-53; }

// --- shared product-of-simplices lattice minimizer -------------------------

using Rows = std::vector<std::vector<double>>;

struct ProductMinResult {
    Rows rows;
    double value = kInf;
};

ProductMinResult polish_on_product_simplex(const std::function<double(const Rows&)>& f,
                                           Rows start, double initial_step, double final_step) {
    ProductMinResult best;
    best.rows = std::move(start);
    best.value = f(best.rows);
    const std::size_t nrows = best.rows.size();

    // shrinking single-row coordinate exchanges
    for (double h = initial_step; h >= final_step * 0.999; h *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t r = 0; r < nrows; ++r) {
                for (std::size_t a = 0; a < best.rows[r].size(); ++a) {
                    for (std::size_t b = 0; b < best.rows[r].size(); ++b) {
                        if (a == b || best.rows[r][b] < h - 1e-15) continue;
                        Rows cand = best.rows;
                        cand[r][a] += h;
                        cand[r][b] -= h;
                        const double v = f(cand);
                        if (v < best.value - 1e-15) {
                            best.value = v;
                            best.rows = std::move(cand);
                            improved = true;
                        }
                    }
                }
            }
        }
    }

    // continuous line searches: per-row pair exchanges, then coupled moves
    // across two rows (slope +-1) so interacting rows can shift together
    auto try_line = [&](std::size_t r1, std::size_t a1, std::size_t b1, bool coupled,
                        std::size_t r2, std::size_t a2, std::size_t b2, double lam) -> bool {
        double lo = -best.rows[r1][a1], hi = best.rows[r1][b1];
        if (coupled) {
            if (lam > 0) {
                lo = std::max(lo, -best.rows[r2][a2] / lam);
                hi = std::min(hi, best.rows[r2][b2] / lam);
            } else {
                lo = std::max(lo, best.rows[r2][b2] / lam);
                hi = std::min(hi, -best.rows[r2][a2] / lam);
            }
        }
        if (hi - lo < 1e-12) return false;
        auto apply = [&](Rows& w, double t) {
            w[r1][a1] = std::max(w[r1][a1] + t, 0.0);
            w[r1][b1] = std::max(w[r1][b1] - t, 0.0);
            if (coupled) {
                w[r2][a2] = std::max(w[r2][a2] + lam * t, 0.0);
                w[r2][b2] = std::max(w[r2][b2] - lam * t, 0.0);
            }
        };
        auto line = [&](double t) {
            Rows cand = best.rows;
            apply(cand, t);
            return -f(cand);
        };
        ScalarMaxResult g = golden_max(line, lo, hi, 1e-10);
        if (-g.value < best.value - 1e-13) {
            apply(best.rows, g.x);
            best.value = -g.value;
            return true;
        }
        return false;
    };
    for (int round = 0; round < 50; ++round) {
        bool improved = false;
        for (std::size_t r = 0; r < nrows; ++r)
            for (std::size_t a = 0; a < best.rows[r].size(); ++a)
                for (std::size_t b = a + 1; b < best.rows[r].size(); ++b)
                    improved |= try_line(r, a, b, false, 0, 0, 0, 0.0);
        for (std::size_t r1 = 0; r1 < nrows; ++r1)
            for (std::size_t r2 = r1 + 1; r2 < nrows; ++r2)
                for (std::size_t a1 = 0; a1 < best.rows[r1].size(); ++a1)
                    for (std::size_t b1 = a1 + 1; b1 < best.rows[r1].size(); ++b1)
                        for (std::size_t a2 = 0; a2 < best.rows[r2].size(); ++a2)
                            for (std::size_t b2 = a2 + 1; b2 < best.rows[r2].size(); ++b2)
                                for (double lam : {1.0, -1.0})
                                    improved |= try_line(r1, a1, b1, true, r2, a2, b2, lam);
        if (!improved) break;
    }
    return best;
}

ProductMinResult minimize_on_product_simplex(const std::function<double(const Rows&)>& f,
                                             const std::vector<std::size_t>& dims,
                                             double final_step) {
    // choose a per-row lattice density keeping the product scan bounded
    int k = 64;
    for (;;) {
        double total = 1.0;
        for (std::size_t d : dims) total *= composition_count(k, d);
        if (total <= 3e5 || k <= 2) break;
        --k;
    }
    std::vector<std::vector<std::vector<int>>> row_pts;
    for (std::size_t d : dims) row_pts.push_back(compositions(k, d));

    // lattice scan, keeping several seeds for the local polish
    constexpr std::size_t kStarts = 8;
    std::vector<ProductMinResult> top;
    std::vector<std::size_t> idx(dims.size(), 0);
    for (;;) {
        Rows w(dims.size());
        for (std::size_t r = 0; r < dims.size(); ++r) {
            w[r].resize(dims[r]);
            for (std::size_t j = 0; j < dims[r]; ++j)
                w[r][j] = static_cast<double>(row_pts[r][idx[r]][j]) / k;
        }
        const double v = f(w);
        if (top.size() < kStarts || v < top.back().value) {
            ProductMinResult cand{std::move(w), v};
            top.insert(std::upper_bound(top.begin(), top.end(), cand,
                                        [](const ProductMinResult& x, const ProductMinResult& y) {
                                            return x.value < y.value;
                                        }),
                       std::move(cand));
            if (top.size() > kStarts) top.pop_back();
        }
        std::size_t pos = 0;
        while (pos < dims.size() && ++idx[pos] == row_pts[pos].size()) idx[pos++] = 0;
        if (pos == dims.size()) break;
    }

    ProductMinResult best;
    for (const ProductMinResult& seed : top) {
        ProductMinResult p = polish_on_product_simplex(f, seed.rows, 1.0 / k, final_step);
        if (p.value < best.value) best = std::move(p);
    }
    return best;
}

Distribution normalized(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    std::vector<double> w(v);
    for (double& x : w) x /= s;
    return Distribution(std::move(w));
}

}  // namespace

CompiledDual compile(const ChannelProblem& cp) {
    const std::size_t nx = cp.num_inputs(), ny = cp.num_outputs();
    std::vector<double> joint(nx * ny);
    std::vector<std::vector<double>> dist(nx * ny, std::vector<double>(nx));
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y) {
            joint[x * ny + y] = cp.Q[x] * cp.channel(x, y);
            for (std::size_t xh = 0; xh < nx; ++xh)
                dist[x * ny + y][xh] = std::log(cp.channel(x, y)) - std::log(cp.channel(xh, y));
        }
    }
    CompiledDual out{SourceProblem(Distribution(std::move(joint)), cp.Q,
                                   DistortionSpec(std::move(dist)), cp.D),
                     nx, ny};
    return out;
}

double dmin_q(const ChannelProblem& cp) {
    const std::size_t nx = cp.num_inputs(), ny = cp.num_outputs();
    double m = kInf;
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x) {
            if (!cp.Q.in_support(x)) continue;
            for (std::size_t xh = 0; xh < nx; ++xh) {
                if (!cp.Q.in_support(xh)) continue;
                m = std::min(m, std::log(cp.channel(x, y)) - std::log(cp.channel(xh, y)));
            }
        }
    return m;
}

double ee(const ChannelProblem& cp, double R) {
    return es_explicit(compile(cp).composite, R);
}

double gallager_er(const ChannelProblem& cp, double R) {
    const std::size_t nx = cp.num_inputs(), ny = cp.num_outputs();
    auto e0_gallager = [&](double rho) {
        std::vector<double> outer;
        outer.reserve(ny);
        std::vector<double> inner;
        for (std::size_t y = 0; y < ny; ++y) {
            inner.clear();
            for (std::size_t x = 0; x < nx; ++x) {
                if (!cp.Q.in_support(x)) continue;
                inner.push_back(std::log(cp.Q[x]) + std::log(cp.channel(x, y)) / (1.0 + rho));
            }
            outer.push_back((1.0 + rho) * log_sum_exp(inner));
        }
        return -log_sum_exp(outer);
    };
    ScalarMaxResult r =
        scan_and_max([&](double rho) { return e0_gallager(rho) - rho * R; }, 0.0, 1.0, 41, 1e-10);
    return std::max(r.value, 0.0);
}

double mutual_information(const ChannelProblem& cp) {
    const std::size_t nx = cp.num_inputs(), ny = cp.num_outputs();
    std::vector<double> py(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) py[y] += cp.Q[x] * cp.channel(x, y);
    double mi = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        if (!cp.Q.in_support(x)) continue;
        for (std::size_t y = 0; y < ny; ++y)
            mi += cp.Q[x] * cp.channel(x, y) * std::log(cp.channel(x, y) / py[y]);
    }
    return std::max(mi, 0.0);
}

ExtReal ec_star_implicit(const ChannelProblem& cp, double R, double grid_resolution) {
    if (cp.num_inputs() * cp.num_outputs() > 9)
        throw ScaleExceeded("ec_star_implicit: |X|*|Y| > 9");
    return ef_implicit_limited(compile(cp).composite, R, grid_resolution, 9);
}

double ec_star_lce(const ChannelProblem& cp, double R) {
    return ef_explicit_lce(compile(cp).composite, R);
}

double ml_correct_exponent(const ChannelProblem& cp, double R) {
    if (R < 0.0) throw std::invalid_argument("ml_correct_exponent: R must be nonnegative");
    const SourceProblem composite = compile(cp.with_threshold(0.0)).composite;
    auto f = [&](double rho) { return e0(1.0 / (1.0 - rho), -rho, composite) + rho * R; };
    ScalarMaxResult r = scan_and_max(f, 0.0, 1.0 - 1e-6, 65, 1e-10);
    return std::max(r.value, 0.0);
}

double ml_correct_implicit_t(const ChannelProblem& cp, double R, double grid_resolution) {
    const CompiledDual dual = compile(cp.with_threshold(0.0));
    const std::size_t dim = dual.composite.P.size();
    if (dim > 9) throw ScaleExceeded("ml_correct_implicit_t: |X|*|Y| > 9");
    auto f = [&](const std::vector<double>& t) -> double {
        Distribution T = normalized(t);
        const ExtReal div = kl_divergence(T, dual.composite.P);
        if (div.is_inf()) return kInf;
        const ExtReal rt = rate(T, dual.composite.Q, dual.composite.d, 0.0).rate;
        const double excess = rt.is_inf() ? 0.0 : std::max(R - rt.value(), 0.0);
        return div.value() + excess;
    };
    const int k = dim <= 4 ? 40 : (dim <= 6 ? 20 : 10);
    SimplexMinResult r = minimize_on_simplex(f, dim, k, grid_resolution);
    return std::max(r.value, 0.0);
}

double ml_correct_implicit_uw(const ChannelProblem& cp, double R, double grid_resolution) {
    const std::size_t nx = cp.num_inputs(), ny = cp.num_outputs();
    if (nx * ny > 9) throw ScaleExceeded("ml_correct_implicit_uw: |X|*|Y| > 9");
    // rows: U(x), then W(y|x) per input symbol
    std::vector<std::size_t> dims(1 + nx);
    dims[0] = nx;
    for (std::size_t x = 0; x < nx; ++x) dims[1 + x] = ny;
    auto f = [&](const Rows& rows) -> double {
        const std::vector<double>& u = rows[0];
        double div = 0.0;       // D(UoW || QoP)
        double div_u = 0.0;     // D(U||Q)
        double mi = 0.0;        // I(UoW)
        std::vector<double> out_y(ny, 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) out_y[y] += u[x] * rows[1 + x][y];
        for (std::size_t x = 0; x < nx; ++x) {
            if (u[x] <= kSupportEps) continue;
            if (!cp.Q.in_support(x)) return kInf;
            div_u += u[x] * std::log(u[x] / cp.Q[x]);
            for (std::size_t y = 0; y < ny; ++y) {
                const double w = rows[1 + x][y];
                if (w <= kSupportEps) continue;
                div += u[x] * w * std::log(u[x] * w / (cp.Q[x] * cp.channel(x, y)));
                mi += u[x] * w * std::log(w / out_y[y]);
            }
        }
        return std::max(div, 0.0) +
               std::max(R - std::max(div_u, 0.0) - std::max(mi, 0.0), 0.0);
    };
    ProductMinResult r = minimize_on_product_simplex(f, dims, grid_resolution);
    return std::max(r.value, 0.0);
}

double dueck_korner_bound(const ChannelProblem& cp, double R, double grid_resolution) {
    const std::size_t nx = cp.num_inputs(), ny = cp.num_outputs();
    if (nx * ny > 9) throw ScaleExceeded("dueck_korner_bound: |X|*|Y| > 9");
    std::vector<std::size_t> dims(nx, ny);
    auto f = [&](const Rows& w) -> double {
        double div = 0.0, mi = 0.0;
        std::vector<double> out_y(ny, 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) out_y[y] += cp.Q[x] * w[x][y];
        for (std::size_t x = 0; x < nx; ++x) {
            if (!cp.Q.in_support(x)) continue;
            for (std::size_t y = 0; y < ny; ++y) {
                if (w[x][y] <= kSupportEps) continue;
                div += cp.Q[x] * w[x][y] * std::log(w[x][y] / cp.channel(x, y));
                mi += cp.Q[x] * w[x][y] * std::log(w[x][y] / out_y[y]);
            }
        }
        return std::max(div, 0.0) + std::max(R - std::max(mi, 0.0), 0.0);
    };
    ProductMinResult r = minimize_on_product_simplex(f, dims, grid_resolution);
    return std::max(r.value, 0.0);
}

double forney_ee(const ChannelProblem& cp, double R) {
    if (R < 0.0) throw std::invalid_argument("forney_ee: R must be nonnegative");
    const SourceProblem composite = compile(cp).composite;
    auto g = [&](double rho) {
        ScalarMaxResult inner =
            scan_and_max([&](double s) { return e0(s, rho, composite); }, 0.0, 1.0, 17, 1e-10);
        return inner.value - rho * R;
    };
    // divergence detector: still climbing by > 1e-6 per doubling at rho = 2^10..2^20
    double prev = g(1024.0);
    bool diverged = true;
    double stop = kRhoLimit;
    for (int k = 11; k <= 20; ++k) {
        const double cur = g(std::pow(2.0, k));
        if (cur <= prev + 1e-6) {
            diverged = false;
            stop = std::pow(2.0, k);
            break;
        }
        prev = cur;
    }
    if (diverged) return kInf;
    ScalarMaxResult lin = scan_and_max(g, 0.0, std::min(stop, 8.0), 49, 1e-9);
    double best = lin.value;
    for (double rho = 16.0; rho <= stop; rho *= 2.0) best = std::max(best, g(rho));
    return std::max(best, 0.0);
}

ForneyExactResult forney_exact(const ChannelProblem& cp, double R) {
    ForneyExactResult out;
    const double a = forney_ee(cp, R);
    const double b = ee(cp, R);
    const double v = std::min(a, b);
    out.value = std::isinf(v) ? ExtReal::infinity() : ExtReal(std::max(v, 0.0));
    if (std::abs(R + cp.D) <= 1e-9) out.exceptional = true;
    if (cp.D < 0.0 && std::abs(cp.D - dmin_q(cp)) <= 1e-9) out.exceptional = true;
    return out;
}

double forney_bound(const ChannelProblem& cp, double R) {
    if (R < 0.0) throw std::invalid_argument("forney_bound: R must be nonnegative");
    const SourceProblem composite = compile(cp).composite;
    auto outer = [&](double rho) {
        ScalarMaxResult inner =
            golden_max([&](double s) { return e0(s, rho, composite); }, 0.0, 1.0, 1e-10);
        return inner.value - rho * R;
    };
    ScalarMaxResult r = scan_and_max(outer, 0.0, 1.0, 41, 1e-9);
    return std::max(r.value, 0.0);
}

QMaxResult maximize_over_q(const std::function<double(const ChannelProblem&)>& objective,
                           const ConditionalDistribution& channel, double D, int restarts,
                           unsigned seed) {
    const std::size_t nx = channel.num_rows();
    if (nx > 4) throw ScaleExceeded("maximize_over_q: |X| > 4");
    if (restarts < 1) restarts = 1;

    auto eval_q = [&](const std::vector<double>& q) -> double {
        Distribution Q = normalized(q);
        return -objective(ChannelProblem(Q, channel, D));
    };

    std::vector<std::vector<double>> starts;
    starts.push_back(std::vector<double>(nx, 1.0 / nx));
    for (int r = static_cast<int>(starts.size()); r < restarts; ++r) {
        std::vector<double> q(nx);
        double s = 0;
        for (std::size_t i = 0; i < nx; ++i) {
            const uint64_t bits = splitmix64(seed * 0x100000001b3ULL + r * 1000003ULL + i);
            q[i] = 0.05 + unit_double(bits);
            s += q[i];
        }
        for (double& v : q) v /= s;
        starts.push_back(std::move(q));
    }

    QMaxResult best{Distribution::uniform(nx), -kInf, restarts};
    for (const auto& start : starts) {
        SimplexMinResult r = polish_on_simplex(eval_q, start, 0.25, 1e-4);
        if (-r.value > best.value) {
            best.value = -r.value;
            best.q = normalized(r.point);
        }
    }
    return best;
}

}  // namespace rcexp

#include "rcexp/optim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rcexp {

namespace {

std::atomic<int> g_threads{0};

int default_threads() {
    if (const char* env = std::getenv("RCEXP_JOBS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace

int num_threads() {
    int n = g_threads.load();
    if (n <= 0) {
        n = default_threads();
        g_threads.store(n);
    }
    return n;
}

void set_num_threads(int n) { g_threads.store(n > 0 ? n : 0); }

ScalarMaxResult golden_max(const std::function<double(double)>& f, double a, double b,
                           double x_tol, int max_iter) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double fa = f(a), fb = f(b);
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > x_tol; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    ScalarMaxResult r;
    r.x = 0.5 * (a + b);
    r.value = f(r.x);
    // keep the best of interior and endpoints
    if (fa > r.value) { r.x = a; r.value = fa; }
    if (fb > r.value) { r.x = b; r.value = fb; }
    return r;
}

ScalarMaxResult grow_and_max(const std::function<double(double)>& f, double x_limit,
                             double x_tol) {
    double lo = 0.0, hi = 1.0;
    double f_lo = f(lo), f_hi = f(hi);
    double prev = lo, f_prev = f_lo;
    while (f_hi >= f_prev && hi < x_limit) {
        prev = hi;
        f_prev = f_hi;
        hi *= 2.0;
        f_hi = f(hi);
    }
    if (f_hi >= f_prev && hi >= x_limit) {
        ScalarMaxResult r;
        r.x = hi;
        r.value = f_hi;
        r.diverged = true;
        return r;
    }
    ScalarMaxResult r = golden_max(f, lo, std::min(hi, x_limit), x_tol);
    if (f_lo > r.value) { r.x = lo; r.value = f_lo; }
    return r;
}

ScalarMaxResult scan_and_max(const std::function<double(double)>& f, double a, double b,
                             int scan_points, double x_tol) {
    if (scan_points < 3) scan_points = 3;
    const double h = (b - a) / (scan_points - 1);
    int best = 0;
    double best_val = -kInf;
    std::vector<double> vals(scan_points);
    for (int i = 0; i < scan_points; ++i) {
        vals[i] = f(a + i * h);
        if (vals[i] > best_val) { best_val = vals[i]; best = i; }
    }
    double lo = a + std::max(0, best - 1) * h;
    double hi = a + std::min(scan_points - 1, best + 1) * h;
    ScalarMaxResult r = golden_max(f, lo, hi, x_tol);
    if (best_val > r.value) { r.x = a + best * h; r.value = best_val; }
    return r;
}

std::vector<std::vector<int>> compositions(int k, std::size_t dim) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(dim, 0);
    // recursive lexicographic enumeration, iteratively
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int rem) {
        if (pos + 1 == dim) {
            cur[pos] = rem;
            out.push_back(cur);
            return;
        }
        for (int c = 0; c <= rem; ++c) {
            cur[pos] = c;
            rec(pos + 1, rem - c);
        }
    };
    rec(0, k);
    return out;
}

double composition_count(int k, std::size_t dim) {
    double c = 1.0;
    for (std::size_t i = 1; i < dim; ++i) c = c * (k + i) / i;
    return c;
}

namespace {

std::vector<double> to_point(const std::vector<int>& comp, int k) {
    std::vector<double> p(comp.size());
    for (std::size_t i = 0; i < comp.size(); ++i)
        p[i] = static_cast<double>(comp[i]) / static_cast<double>(k);
    return p;
}

SimplexMinResult lattice_scan(const std::function<double(const std::vector<double>&)>& f,
                              std::size_t dim, int k, bool parallel,
                              std::vector<std::size_t>* top_indices, int top_count) {
    const auto comps = compositions(k, dim);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(comps.size());
    std::vector<double> vals(comps.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 64) num_threads(num_threads())
        for (std::ptrdiff_t i = 0; i < n; ++i) vals[i] = f(to_point(comps[i], k));
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) vals[i] = f(to_point(comps[i], k));
    }
    std::vector<std::size_t> order(comps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + std::min<std::size_t>(top_count, order.size()),
                      order.end(), [&](std::size_t a, std::size_t b) {
                          if (vals[a] != vals[b]) return vals[a] < vals[b];
                          return a < b;
                      });
    if (top_indices) {
        top_indices->assign(order.begin(),
                            order.begin() + std::min<std::size_t>(top_count, order.size()));
    }
    SimplexMinResult r;
    r.point = to_point(comps[order[0]], k);
    r.value = vals[order[0]];
    return r;
}

SimplexMinResult minimize_impl(const std::function<double(const std::vector<double>&)>& f,
                               std::size_t dim, int coarse_k, double final_step,
                               int polish_starts, bool parallel) {
    if (dim == 1) {
        SimplexMinResult r;
        r.point = {1.0};
        r.value = f(r.point);
        return r;
    }
    std::vector<std::size_t> top;
    const auto comps = compositions(coarse_k, dim);
    SimplexMinResult best = lattice_scan(f, dim, coarse_k, parallel, &top, polish_starts);
    for (std::size_t idx : top) {
        SimplexMinResult p =
            polish_on_simplex(f, to_point(comps[idx], coarse_k), 1.0 / coarse_k, final_step);
        if (p.value < best.value) best = p;
    }
    return best;
}

}  // namespace

SimplexMinResult minimize_on_simplex(const std::function<double(const std::vector<double>&)>& f,
                                     std::size_t dim, int coarse_k, double final_step,
                                     int polish_starts, bool parallel) {
    return minimize_impl(f, dim, coarse_k, final_step, polish_starts, parallel);
}

SimplexMinResult minimize_on_simplex_serial(
    const std::function<double(const std::vector<double>&)>& f, std::size_t dim, int coarse_k,
    double final_step, int polish_starts) {
    return minimize_impl(f, dim, coarse_k, final_step, polish_starts, false);
}

SimplexMinResult polish_on_simplex(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> start, double initial_step,
                                   double final_step) {
    SimplexMinResult best;
    best.point = std::move(start);
    best.value = f(best.point);
    const std::size_t dim = best.point.size();
    for (double h = initial_step; h >= final_step * 0.999; h *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t i = 0; i < dim; ++i) {
                for (std::size_t j = 0; j < dim; ++j) {
                    if (i == j || best.point[j] < h - 1e-15) continue;
                    std::vector<double> cand = best.point;
                    cand[i] += h;
                    cand[j] -= h;
                    if (cand[j] < 0) cand[j] = 0;
                    // renormalize drift
                    double s = 0;
                    for (double v : cand) s += v;
                    for (double& v : cand) v /= s;
                    double val = f(cand);
                    if (val < best.value - 1e-15) {
                        best.point = std::move(cand);
                        best.value = val;
                        improved = true;
                    }
                }
            }
        }
    }
    // continuous line searches: the fixed-step exchanges above stall at grid
    // resolution, so finish with golden sections along pairwise exchange
    // directions e_i - e_j, plus coupled double exchanges so descent can
    // follow non-axis-aligned kinks in the objective
    std::vector<double> dir(dim);
    auto try_line = [&](bool& any) {
        // feasible step range keeping every coordinate nonnegative; dir sums
        // to zero so the point stays on the simplex
        double lo = -kInf, hi = kInf;
        for (std::size_t c = 0; c < dim; ++c) {
            if (dir[c] > 0) lo = std::max(lo, -best.point[c] / dir[c]);
            if (dir[c] < 0) hi = std::min(hi, -best.point[c] / dir[c]);
        }
        if (!(hi - lo > 1e-12)) return;
        auto apply = [&](std::vector<double>& p, double t) {
            for (std::size_t c = 0; c < dim; ++c) p[c] = std::max(p[c] + dir[c] * t, 0.0);
        };
        auto line = [&](double t) {
            std::vector<double> cand = best.point;
            apply(cand, t);
            return -f(cand);
        };
        ScalarMaxResult r = golden_max(line, lo, hi, 1e-10);
        if (-r.value < best.value - 1e-13) {
            apply(best.point, r.x);
            best.value = -r.value;
            any = true;
        }
    };
    for (int round = 0; round < 50; ++round) {
        bool improved = false;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i + 1; j < dim; ++j) {
                std::fill(dir.begin(), dir.end(), 0.0);
                dir[i] = 1.0;
                dir[j] = -1.0;
                try_line(improved);
            }
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i + 1; j < dim; ++j)
                for (std::size_t k = 0; k < dim; ++k)
                    for (std::size_t l = k + 1; l < dim; ++l) {
                        if (k == i && l == j) continue;
                        for (double lam : {1.0, -1.0, 0.5, -0.5, 2.0, -2.0}) {
                            std::fill(dir.begin(), dir.end(), 0.0);
                            dir[i] += 1.0;
                            dir[j] -= 1.0;
                            dir[k] += lam;
                            dir[l] -= lam;
                            try_line(improved);
                        }
                    }
        if (!improved) break;
    }
    return best;
}

}  // namespace rcexp

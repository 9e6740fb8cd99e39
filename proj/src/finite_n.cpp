#include "rcexp/finite_n.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "rcexp/optim.hpp"

namespace rcexp {

namespace {

constexpr const char* kRngAlgorithm = "splitmix64-counter-v1";

uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit_double(uint64_t bits) { return (bits >> 11) * 0x1.0p-53; }

/// Counter-based stream: value j of trial t under a fixed seed.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t trial)
        : base_(splitmix64(seed ^ 0x5851f42d4c957f2dULL) + trial * 0x9e3779b97f4a7c15ULL) {}
    double next() { return unit_double(splitmix64(base_ + counter_++)); }

private:
    uint64_t base_;
    uint64_t counter_ = 0;
};

std::size_t sample_index(const Distribution& dist, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
        acc += dist[i];
        if (u < acc) return i;
    }
    return dist.size() - 1;
}

// log n! cached
const std::vector<double>& log_factorials(int n) {
    static std::vector<double> cache{0.0};
    if (static_cast<int>(cache.size()) <= n) {
        std::size_t old = cache.size();
        cache.resize(n + 1);
        for (std::size_t k = old; k <= static_cast<std::size_t>(n); ++k)
            cache[k] = cache[k - 1] + std::log(static_cast<double>(k));
    }
    return cache;
}

double log_multinomial(int n, const std::vector<int>& counts) {
    const auto& lf = log_factorials(n);
    double v = lf[n];
    for (int c : counts) v -= lf[c];
    return v;
}

// ln(1 - e^a) for a <= 0
double log1mexp(double a) {
    if (a >= 0.0) return -kInf;
    if (a > -0.6931471805599453) return std::log(-std::expm1(a));
    return std::log1p(-std::exp(a));
}

// log of 1 - (1-p)^M given lq = M ln(1-p)
double log_hit_at_least_once(double p, double m_codewords) {
    if (m_codewords <= 0.0) return -kInf;
    if (p >= 1.0) return 0.0;
    const double lq = m_codewords * std::log1p(-p);
    return log1mexp(lq);
}

struct TypeTerm {
    double log_type_prob;  // -inf if the type is impossible under P
    double p_cover;        // per-codeword distortion-ball probability
};

// Per-type covering probabilities via integer-scaled distortion DP.
std::vector<TypeTerm> success_type_terms(const SourceProblem& problem, const CodebookSpec& spec) {
    const int n = spec.n;
    if (n > 64 || problem.P.size() > 3 || problem.Q.size() > 3)
        throw ScaleExceeded("exact_success_prob: n <= 64 and |X|,|Xhat| <= 3");
    if (!problem.d.has_rational())
        throw std::invalid_argument("exact_success_prob: distortion has no rational form");

    const auto& rat = problem.d.rational_values();
    long long lcd = 1;
    for (const auto& row : rat)
        for (const Rational& r : row) lcd = std::lcm(lcd, r.den);

    const std::size_t nx = problem.P.size(), nxh = problem.Q.size();
    std::vector<std::vector<long long>> v(nx, std::vector<long long>(nxh));
    long long vmin = 0, vmax = 0;
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t xh = 0; xh < nxh; ++xh) {
            v[x][xh] = rat[x][xh].num * (lcd / rat[x][xh].den);
            vmin = std::min(vmin, v[x][xh]);
            vmax = std::max(vmax, v[x][xh]);
        }
    if (static_cast<double>(n) * (vmax - vmin) > 5e7)
        throw std::overflow_error("exact_success_prob: scaled-distortion range overflow");

    // per-source-symbol value range over supp(Q)
    std::vector<long long> row_min(nx), row_max(nx);
    for (std::size_t x = 0; x < nx; ++x) {
        long long lo = std::numeric_limits<long long>::max(), hi = std::numeric_limits<long long>::min();
        for (std::size_t xh = 0; xh < nxh; ++xh)
            if (problem.Q.in_support(xh)) {
                lo = std::min(lo, v[x][xh]);
                hi = std::max(hi, v[x][xh]);
            }
        row_min[x] = lo;
        row_max[x] = hi;
    }

    const double threshold = std::floor(static_cast<double>(n) * problem.D *
                                            static_cast<double>(lcd) +
                                        1e-9);

    const auto types = compositions(n, nx);
    std::vector<TypeTerm> terms(types.size());
    log_factorials(n);  // warm the cache before the parallel region
    const std::ptrdiff_t nt = static_cast<std::ptrdiff_t>(types.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(num_threads())
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const std::vector<int>& t = types[ti];
        double lp = log_multinomial(n, t);
        bool possible = true;
        for (std::size_t x = 0; x < nx; ++x) {
            if (t[x] == 0) continue;
            if (!problem.P.in_support(x)) { possible = false; break; }
            lp += t[x] * std::log(problem.P[x]);
        }
        if (!possible) {
            terms[ti] = {-kInf, 0.0};
            continue;
        }
        // DP over the scaled distortion sum for a fixed x of composition t
        long long offset = 0, span = 0;
        for (std::size_t x = 0; x < nx; ++x) {
            offset += static_cast<long long>(t[x]) * row_min[x];
            span += static_cast<long long>(t[x]) * (row_max[x] - row_min[x]);
        }
        std::vector<double> dp{1.0};
        dp.reserve(span + 1);
        for (std::size_t x = 0; x < nx; ++x) {
            for (int rep = 0; rep < t[x]; ++rep) {
                std::vector<double> next(dp.size() + (row_max[x] - row_min[x]), 0.0);
                for (std::size_t i = 0; i < dp.size(); ++i) {
                    if (dp[i] == 0.0) continue;
                    for (std::size_t xh = 0; xh < nxh; ++xh)
                        if (problem.Q.in_support(xh))
                            next[i + (v[x][xh] - row_min[x])] += dp[i] * problem.Q[xh];
                }
                dp = std::move(next);
            }
        }
        double p = 0.0;
        for (std::size_t i = 0; i < dp.size(); ++i)
            if (static_cast<double>(offset) + static_cast<double>(i) <= threshold) p += dp[i];
        terms[ti] = {lp, std::clamp(p, 0.0, 1.0)};
    }
    return terms;
}

}  // namespace

CodebookSpec CodebookSpec::source(int n, double R) {
    if (n <= 0 || R < 0.0) throw std::invalid_argument("CodebookSpec: bad n or R");
    if (n * R > 40.0) throw ScaleExceeded("CodebookSpec: nR too large for integer M");
    return CodebookSpec{n, R, static_cast<std::uint64_t>(std::ceil(std::exp(n * R)))};
}

CodebookSpec CodebookSpec::channel(int n, double R) {
    CodebookSpec s = source(n, R);
    s.M += 1;
    return s;
}

ExactProbability exact_success_prob(const SourceProblem& problem, const CodebookSpec& spec) {
    const auto terms = success_type_terms(problem, spec);
    std::vector<double> logs;
    logs.reserve(terms.size());
    for (const TypeTerm& t : terms) {
        if (std::isinf(t.log_type_prob)) continue;
        logs.push_back(t.log_type_prob +
                       log_hit_at_least_once(t.p_cover, static_cast<double>(spec.M)));
    }
    ExactProbability out;
    out.log_value = std::min(log_sum_exp(logs), 0.0);
    out.method = ProbMethod::dp;
    return out;
}

ExactProbability exact_failure_prob(const SourceProblem& problem, const CodebookSpec& spec) {
    const auto terms = success_type_terms(problem, spec);
    std::vector<double> logs;
    logs.reserve(terms.size());
    for (const TypeTerm& t : terms) {
        if (std::isinf(t.log_type_prob)) continue;
        if (t.p_cover >= 1.0) continue;  // failure impossible on this type
        logs.push_back(t.log_type_prob + static_cast<double>(spec.M) * std::log1p(-t.p_cover));
    }
    ExactProbability out;
    out.log_value = std::min(log_sum_exp(logs), 0.0);
    out.method = ProbMethod::dp;
    return out;
}

ExactProbability exact_channel_error_prob(const ChannelProblem& cp, const CodebookSpec& spec) {
    const int n = spec.n;
    const std::size_t nx = cp.num_inputs(), ny = cp.num_outputs();
    if (n > 20 || nx > 3 || ny > 3)
        throw ScaleExceeded("exact_channel_error_prob: n <= 20 and |X|,|Y| <= 3");

    std::vector<double> log_joint(nx * ny), llr(nx * ny * nx);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) {
            log_joint[x * ny + y] =
                cp.Q.in_support(x) ? std::log(cp.Q[x]) + std::log(cp.channel(x, y)) : -kInf;
            for (std::size_t xh = 0; xh < nx; ++xh)
                llr[(x * ny + y) * nx + xh] =
                    std::log(cp.channel(x, y)) - std::log(cp.channel(xh, y));
        }

    const double nD = static_cast<double>(n) * cp.D;
    const double competitors = static_cast<double>(spec.M - 1);
    const auto types = compositions(n, nx * ny);
    std::vector<double> logs(types.size(), -kInf);
    log_factorials(n);  // warm the cache before the parallel region
    const std::ptrdiff_t nt = static_cast<std::ptrdiff_t>(types.size());

#pragma omp parallel for schedule(dynamic, 16) num_threads(num_threads())
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const std::vector<int>& t = types[ti];
        double lp = log_multinomial(n, t);
        bool possible = true;
        for (std::size_t c = 0; c < t.size(); ++c) {
            if (t[c] == 0) continue;
            if (std::isinf(log_joint[c])) { possible = false; break; }
            lp += t[c] * log_joint[c];
        }
        if (!possible) continue;

        // q(t): enumerate the competitor's conditional compositions per cell
        std::vector<double> hit_logs;
        std::vector<int> k(nx, 0);
        std::function<void(std::size_t, double, double)> rec = [&](std::size_t cell, double logp,
                                                                   double llr_sum) {
            if (cell == t.size()) {
                if (llr_sum <= nD + 1e-9) hit_logs.push_back(logp);
                return;
            }
            const int m = t[cell];
            if (m == 0) {
                rec(cell + 1, logp, llr_sum);
                return;
            }
            // compositions of m over the competitor alphabet restricted to supp(Q)
            std::function<void(std::size_t, int, double, double)> cell_rec =
                [&](std::size_t xh, int rem, double lq, double lsum) {
                    if (xh + 1 == nx) {
                        if (rem > 0 && !cp.Q.in_support(xh)) return;
                        double lq2 = lq;
                        if (rem > 0) lq2 += rem * std::log(cp.Q[xh]) - log_factorials(n)[rem];
                        rec(cell + 1, logp + log_factorials(n)[m] + lq2,
                            llr_sum + lsum + rem * llr[cell * nx + xh]);
                        return;
                    }
                    const int top = cp.Q.in_support(xh) ? rem : 0;
                    for (int c = 0; c <= top; ++c) {
                        cell_rec(xh + 1, rem - c,
                                 lq + (c > 0 ? c * std::log(cp.Q[xh]) - log_factorials(n)[c] : 0.0),
                                 lsum + c * llr[cell * nx + xh]);
                    }
                };
            cell_rec(0, m, 0.0, 0.0);
        };
        rec(0, 0.0, 0.0);
        const double q = std::clamp(std::exp(log_sum_exp(hit_logs)), 0.0, 1.0);
        logs[ti] = lp + log_hit_at_least_once(q, competitors);
    }

    ExactProbability out;
    out.log_value = std::min(log_sum_exp(logs), 0.0);
    out.method = ProbMethod::enumeration;
    return out;
}

ExactProbability mc_simulate(const ChannelProblem& cp, const CodebookSpec& spec,
                             DecoderKind decoder, std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1000) throw std::invalid_argument("mc_simulate: trials >= 1000 required");
    const int n = spec.n;
    const std::size_t competitors = static_cast<std::size_t>(spec.M - 1);
    const double nD = static_cast<double>(n) * cp.D;
    const std::size_t ny = cp.num_outputs();

    std::vector<double> log_p(cp.num_inputs() * ny);
    for (std::size_t x = 0; x < cp.num_inputs(); ++x)
        for (std::size_t y = 0; y < ny; ++y) log_p[x * ny + y] = std::log(cp.channel(x, y));

    std::uint64_t errors = 0;
    const std::ptrdiff_t nt = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(static) reduction(+ : errors) num_threads(num_threads())
    for (std::ptrdiff_t trial = 0; trial < nt; ++trial) {
        CounterRng rng(seed, static_cast<std::uint64_t>(trial));
        std::vector<std::size_t> xm(n), yv(n);
        for (int i = 0; i < n; ++i) xm[i] = sample_index(cp.Q, rng.next());
        for (int i = 0; i < n; ++i) yv[i] = sample_index(cp.channel.row(xm[i]), rng.next());
        double log_like_true = 0.0;
        for (int i = 0; i < n; ++i) log_like_true += log_p[xm[i] * ny + yv[i]];

        bool error = false;
        if (decoder == DecoderKind::simplified) {
            for (std::size_t m = 0; m < competitors && !error; ++m) {
                double log_like = 0.0;
                for (int i = 0; i < n; ++i) log_like += log_p[sample_index(cp.Q, rng.next()) * ny + yv[i]];
                // non-strict comparison; the 1e-9 slack keeps floating-point
                // round-off from splitting exact ties differently than the
                // type-enumeration oracle does
                if (log_like_true - log_like <= nD + 1e-9) error = true;
            }
        } else {
            std::vector<double> competitor_logs(competitors);
            for (std::size_t m = 0; m < competitors; ++m) {
                double log_like = 0.0;
                for (int i = 0; i < n; ++i) log_like += log_p[sample_index(cp.Q, rng.next()) * ny + yv[i]];
                competitor_logs[m] = log_like;
            }
            error = competitors > 0 && log_like_true - log_sum_exp(competitor_logs) < nD;
        }
        if (error) ++errors;
    }

    ExactProbability out;
    out.log_value = errors == 0 ? -kInf
                                : std::log(static_cast<double>(errors)) -
                                      std::log(static_cast<double>(trials));
    out.method = ProbMethod::monte_carlo;
    out.errors = errors;
    out.trials = trials;
    out.rng_algorithm = kRngAlgorithm;
    const WilsonInterval w = wilson_interval(errors, trials, 1.0);
    out.ci_halfwidth = w.lo > 0.0 ? 0.5 * (std::log(w.hi) - std::log(w.lo)) : kInf;
    return out;
}

DecoderComparison mc_compare_decoders(const ChannelProblem& cp, const CodebookSpec& spec,
                                      std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1000) throw std::invalid_argument("mc_compare_decoders: trials >= 1000 required");
    const int n = spec.n;
    const std::size_t competitors = static_cast<std::size_t>(spec.M - 1);
    const double nD = static_cast<double>(n) * cp.D;
    const std::size_t ny = cp.num_outputs();

    std::vector<double> log_p(cp.num_inputs() * ny);
    for (std::size_t x = 0; x < cp.num_inputs(); ++x)
        for (std::size_t y = 0; y < ny; ++y) log_p[x * ny + y] = std::log(cp.channel(x, y));

    std::uint64_t simp = 0, opt = 0, ties = 0;
    const std::ptrdiff_t nt = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(static) reduction(+ : simp, opt, ties) num_threads(num_threads())
    for (std::ptrdiff_t trial = 0; trial < nt; ++trial) {
        CounterRng rng(seed, static_cast<std::uint64_t>(trial));
        std::vector<std::size_t> xm(n), yv(n);
        for (int i = 0; i < n; ++i) xm[i] = sample_index(cp.Q, rng.next());
        for (int i = 0; i < n; ++i) yv[i] = sample_index(cp.channel.row(xm[i]), rng.next());
        double log_like_true = 0.0;
        for (int i = 0; i < n; ++i) log_like_true += log_p[xm[i] * ny + yv[i]];

        double best = -kInf;
        std::vector<double> competitor_logs(competitors);
        for (std::size_t m = 0; m < competitors; ++m) {
            double log_like = 0.0;
            for (int i = 0; i < n; ++i)
                log_like += log_p[sample_index(cp.Q, rng.next()) * ny + yv[i]];
            competitor_logs[m] = log_like;
            best = std::max(best, log_like);
        }
        const double margin = log_like_true - best;
        if (margin <= nD + 1e-9) ++simp;
        if (std::abs(margin - nD) <= 1e-12 * std::max(1.0, std::abs(nD))) ++ties;
        if (competitors > 0 && log_like_true - log_sum_exp(competitor_logs) < nD) ++opt;
    }
    return DecoderComparison{simp, opt, ties};
}

WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z) {
    const double nn = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return WilsonInterval{std::max(center - half, 0.0), std::min(center + half, 1.0)};
}

bool lemma2_check(double I, double R, int n) {
    if (!(I < R)) throw std::invalid_argument("lemma2_check: requires I < R (eps > 0)");
    const double eps = R - I;
    const double lhs_log = std::exp(n * R) * std::log1p(-std::exp(-n * I));
    return lhs_log < -std::exp(n * eps);
}

}  // namespace rcexp

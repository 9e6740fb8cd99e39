#include "rcexp/e0.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rcexp {

double e0(double s, double rho, const SourceProblem& problem) {
    if (s < 0.0) throw std::invalid_argument("e0: s must be nonnegative");
    const Distribution& P = problem.P;
    const Distribution& Q = problem.Q;
    const DistortionSpec& d = problem.d;

    std::vector<double> outer;
    outer.reserve(P.size());
    std::vector<double> inner;
    for (std::size_t x = 0; x < P.size(); ++x) {
        if (!P.in_support(x)) continue;
        inner.clear();
        for (std::size_t xh = 0; xh < Q.size(); ++xh) {
            if (!Q.in_support(xh)) continue;
            inner.push_back(std::log(Q[xh]) - s * (d(x, xh) - problem.D));
        }
        outer.push_back(std::log(P[x]) + rho * log_sum_exp(inner));
    }
    const double v = -log_sum_exp(outer);
    if (std::isnan(v)) throw std::overflow_error("e0: log-domain reduction failed");
    return v;
}

double e0_channel(double s, double rho, const ChannelProblem& cp) {
    if (s < 0.0) throw std::invalid_argument("e0_channel: s must be nonnegative");
    const std::size_t nx = cp.num_inputs(), ny = cp.num_outputs();
    std::vector<double> log_p(nx * ny);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) log_p[x * ny + y] = std::log(cp.channel(x, y));

    std::vector<double> outer;
    std::vector<double> inner;
    for (std::size_t x = 0; x < nx; ++x) {
        if (!cp.Q.in_support(x)) continue;
        for (std::size_t y = 0; y < ny; ++y) {
            inner.clear();
            for (std::size_t xh = 0; xh < nx; ++xh) {
                if (!cp.Q.in_support(xh)) continue;
                const double llr = log_p[x * ny + y] - log_p[xh * ny + y];
                inner.push_back(std::log(cp.Q[xh]) - s * (llr - cp.D));
            }
            outer.push_back(std::log(cp.Q[x]) + log_p[x * ny + y] + rho * log_sum_exp(inner));
        }
    }
    const double v = -log_sum_exp(outer);
    if (std::isnan(v)) throw std::overflow_error("e0_channel: log-domain reduction failed");
    return v;
}

}  // namespace rcexp

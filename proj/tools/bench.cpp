// Benchmarks the OpenMP-parallel kernels against their serial references.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "rcexp/channel.hpp"
#include "rcexp/finite_n.hpp"
#include "rcexp/optim.hpp"
#include "rcexp/source_exponents.hpp"

using namespace rcexp;

namespace {

template <typename F>
double time_s(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial_s, double parallel_s, double dev) {
    std::printf("%-28s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  |diff| %.3g\n", name,
                serial_s, parallel_s, serial_s / parallel_s, dev);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", num_threads());

    // Simplex lattice minimization: the implicit-form exponent objective.
    SourceProblem sp(Distribution({0.6, 0.25, 0.15}), Distribution({0.4, 0.35, 0.25}),
                     DistortionSpec({{0.0, 1.0, 0.7}, {1.0, 0.0, 0.4}, {0.6, 0.9, 0.0}}), 0.3);
    const double R = 0.35;
    auto objective = [&](const std::vector<double>& t) {
        Distribution T(t);
        ExtReal dkl = kl_divergence(T, sp.P);
        if (dkl.is_inf()) return kInf;
        RateResult rr = rate(T, sp.Q, sp.d, sp.D);
        if (rr.rate.is_inf()) return kInf;
        return dkl.value() + std::max(0.0, rr.rate.value() - R);
    };
    SimplexMinResult ser, par;
    const double t_ser = time_s([&] { ser = minimize_on_simplex_serial(objective, 3, 150, 1e-6); });
    const double t_par = time_s([&] { par = minimize_on_simplex(objective, 3, 150, 1e-6); });
    report("simplex lattice min", t_ser, t_par, std::abs(ser.value - par.value));

    // Finite-n channel oracle: joint-type + conditional-composition enumeration.
    ChannelProblem bsc = make_bsc(0.08, Distribution::uniform(2), 0.0);
    CodebookSpec cb = CodebookSpec::channel(18, 0.25);
    double p_ser = 0, p_par = 0;
    const int saved = num_threads();
    set_num_threads(1);
    const double e_ser = time_s([&] { p_ser = exact_channel_error_prob(bsc, cb).log_value; });
    set_num_threads(saved);
    const double e_par = time_s([&] { p_par = exact_channel_error_prob(bsc, cb).log_value; });
    report("channel type enumeration", e_ser, e_par, std::abs(p_ser - p_par));

    // Monte Carlo decoder simulation (counter-based RNG; same stream per trial).
    const std::uint64_t trials = 400000;
    ExactProbability m_ser, m_par;
    set_num_threads(1);
    const double s_ser = time_s(
        [&] { m_ser = mc_simulate(bsc, cb, DecoderKind::simplified, trials, 7); });
    set_num_threads(saved);
    const double s_par = time_s(
        [&] { m_par = mc_simulate(bsc, cb, DecoderKind::simplified, trials, 7); });
    report("monte carlo decoder", s_ser, s_par,
           std::abs(static_cast<double>(*m_ser.errors) - static_cast<double>(*m_par.errors)));
    return 0;
}

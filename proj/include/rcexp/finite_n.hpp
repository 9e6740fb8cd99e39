#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rcexp/channel_problem.hpp"
#include "rcexp/core.hpp"
#include "rcexp/rate.hpp"

namespace rcexp {

/// Empirical composition of a length-n sequence.
struct TypeClass {
    std::vector<int> composition;
    int n;
};

/// Codebook of M i.i.d. Q-codewords at blocklength n.
struct CodebookSpec {
    int n;
    double R;        // nats/symbol
    std::uint64_t M;

    /// Source mode: M = ceil(e^{nR}).
    static CodebookSpec source(int n, double R);
    /// Channel mode: M = ceil(e^{nR}) + 1 (one codeword is the transmitted one).
    static CodebookSpec channel(int n, double R);
};

enum class ProbMethod { enumeration, dp, monte_carlo };

struct ExactProbability {
    double log_value;  // natural log of the probability, <= 0 (-inf for 0)
    ProbMethod method;
    std::optional<double> ci_halfwidth;  // log-domain, Monte Carlo only
    // Monte Carlo bookkeeping (for interval checks and reproducibility)
    std::optional<std::uint64_t> errors;
    std::optional<std::uint64_t> trials;
    std::optional<std::string> rng_algorithm;

    double probability() const { return std::exp(log_value); }
};

/// Pr{exists m: d(X, Xhat_m) <= nD} by type enumeration plus an exact
/// integer-scaled distortion-sum DP. Requires rational distortion entries;
/// n <= 64 at |X|,|Xhat| <= 3.
ExactProbability exact_success_prob(const SourceProblem& problem, const CodebookSpec& spec);

/// Complement of the success event, accumulated in log-domain directly so
/// tiny failure probabilities keep full precision.
ExactProbability exact_failure_prob(const SourceProblem& problem, const CodebookSpec& spec);

/// Pr{exists m' != m: LLR(X_m, Y; X_m') <= nD} for the simplified decoder,
/// by joint-type enumeration over (x,y) and conditional-type enumeration of
/// the competitor. n <= 20, |X|,|Y| <= 3.
ExactProbability exact_channel_error_prob(const ChannelProblem& cp, const CodebookSpec& spec);

enum class DecoderKind { simplified, optimum_tradeoff };

/// Monte Carlo estimate of the decoder error probability with a Wilson
/// interval. Counter-based seeded RNG; bit-reproducible for a fixed seed,
/// independent of thread count.
ExactProbability mc_simulate(const ChannelProblem& cp, const CodebookSpec& spec,
                             DecoderKind decoder, std::uint64_t trials, std::uint64_t seed);

/// Both decoders run on the same sampled codebooks (same seed and counter
/// positions), with likelihood ties against the best competitor counted
/// separately.
struct DecoderComparison {
    std::uint64_t simplified_errors = 0;
    std::uint64_t optimum_errors = 0;
    std::uint64_t ties = 0;  // trials where the true LLR margin hits nD exactly
};
DecoderComparison mc_compare_decoders(const ChannelProblem& cp, const CodebookSpec& spec,
                                      std::uint64_t trials, std::uint64_t seed);

/// Wilson score interval half-width bounds in probability domain.
struct WilsonInterval {
    double lo;
    double hi;
};
WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z);

/// Checks (1 - e^{-nI})^{e^{nR}} < exp(-e^{n eps}) with eps = R - I > 0,
/// in log-domain.
bool lemma2_check(double I, double R, int n);

}  // namespace rcexp

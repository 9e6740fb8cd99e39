#pragma once

#include <functional>

#include "rcexp/channel_problem.hpp"
#include "rcexp/core.hpp"
#include "rcexp/source_exponents.hpp"

namespace rcexp {

/// The channel problem rewritten as a source problem: source alphabet X x Y
/// with law Q(x)P(y|x), reproduction law Q, and the per-symbol LLR distortion
/// d((x,y),xh) = ln P(y|x) - ln P(y|xh).
struct CompiledDual {
    SourceProblem composite;
    std::size_t num_inputs;
    std::size_t num_outputs;

    std::size_t joint_index(std::size_t x, std::size_t y) const {
        return x * num_outputs + y;
    }
};

CompiledDual compile(const ChannelProblem& cp);

/// Minimal LLR distortion on the support of Q:
/// min over y and over x,xh with Q(x)Q(xh) > 0 of ln P(y|x)/P(y|xh).
double dmin_q(const ChannelProblem& cp);

/// Decoding error exponent of the simplified erasure/list decoder (explicit).
double ee(const ChannelProblem& cp, double R);

/// Gallager's random coding exponent, evaluated from its own formula:
///   max_{0<=rho<=1} { -ln sum_y [sum_x Q(x)P(y|x)^{1/(1+rho)}]^{1+rho} - rho R }.
/// Independent oracle for ee() at D = 0.
double gallager_er(const ChannelProblem& cp, double R);

/// I(X;Y) of the joint Q o P.
double mutual_information(const ChannelProblem& cp);

/// Strict correct-decoding exponent (no tie-breaking), implicit form over
/// joint laws T(x,y). |X|*|Y| <= 9.
ExtReal ec_star_implicit(const ChannelProblem& cp, double R, double grid_resolution);

/// Lower convex envelope of the strict correct-decoding exponent (explicit).
double ec_star_lce(const ChannelProblem& cp, double R);

/// Correct-decoding exponent of the ML decoder, explicit rho-form:
///   sup_{0<=rho<1} { E0(1/(1-rho), -rho, Q, 0) + rho R }.
double ml_correct_exponent(const ChannelProblem& cp, double R);

/// Implicit form over joint T(x,y): min_T { D(T||QoP) + |R - R(T,Q,0)|^+ }.
double ml_correct_implicit_t(const ChannelProblem& cp, double R, double grid_resolution);

/// Alternative implicit form over (U(x), W(y|x)):
///   min { D(UoW || QoP) + |R - D(U||Q) - I(UoW)|^+ }.
double ml_correct_implicit_uw(const ChannelProblem& cp, double R, double grid_resolution);

/// Dueck-Korner fixed-composition bound:
///   min over W(y|x) of D(QoW || QoP) + |R - I(QoW)|^+.  Upper-bounds
/// ml_correct_exponent. |X|*|Y| <= 9.
double dueck_korner_bound(const ChannelProblem& cp, double R, double grid_resolution);

/// The second term of the optimum tradeoff exponent:
///   sup_{rho>=0} sup_{0<=s<=1} { E0(s,rho,Q,D) - rho R }.
/// +inf when the sup grows without bound (0 < R < -D).
double forney_ee(const ChannelProblem& cp, double R);

struct ForneyExactResult {
    ExtReal value;
    /// Set when (R, D) falls on one of the excluded points: R = -D, or a
    /// negative D matching this Q's minimal LLR distortion.
    bool exceptional = false;
};

/// Exact optimum-tradeoff error exponent at fixed Q: min{forney_ee, ee}.
ForneyExactResult forney_exact(const ChannelProblem& cp, double R);

/// Forney's random coding lower bound:
///   sup_{0<=rho<=1} sup_{0<=s<=1} { E0(s,rho,Q,D) - rho R }.
double forney_bound(const ChannelProblem& cp, double R);

struct QMaxResult {
    Distribution q;
    double value;
    int restarts;  // best-effort: a lower bound on the sup, not a certificate
};

/// Multistart numeric maximization of a channel exponent over the input law Q.
/// |X| <= 4.
QMaxResult maximize_over_q(const std::function<double(const ChannelProblem&)>& objective,
                           const ConditionalDistribution& channel, double D, int restarts,
                           unsigned seed = 1);

}  // namespace rcexp

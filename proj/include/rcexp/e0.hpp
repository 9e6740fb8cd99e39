#pragma once

#include "rcexp/channel_problem.hpp"
#include "rcexp/core.hpp"

namespace rcexp {

/// E0(s, rho, Q, D) = -ln sum_x P(x) [sum_xh Q(xh) e^{-s[d(x,xh)-D]}]^rho,
/// evaluated with max-shifted log-domain sums. rho of either sign; s >= 0.
double e0(double s, double rho, const SourceProblem& problem);

/// Channel form of E0 under the LLR distortion, evaluated directly from the
/// channel matrix (independent of the compiled source-problem route).
double e0_channel(double s, double rho, const ChannelProblem& cp);

}  // namespace rcexp

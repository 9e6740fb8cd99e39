#pragma once

#include <optional>

#include "rcexp/core.hpp"

namespace rcexp {

/// Thrown when a brute-force oracle is asked for more than desk scale.
struct ScaleExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RateResult {
    ExtReal rate;                                  // nats
    std::optional<double> s_star;                  // Lagrange slope
    std::optional<ConditionalDistribution> w_star; // achiever
    bool at_min_distortion_boundary = false;       // D == min achievable, achiever not certified
};

/// R(T,Q,D): min over couplings W with d(T o W) <= D of D(T o W || T x Q).
/// +inf iff the constraint set is empty. Computed by a concave 1-D dual
/// maximization over the tilt s, with the achiever W_s(xh|x) ~ Q(xh) e^{-s d(x,xh)}.
RateResult rate(const Distribution& T, const Distribution& Q, const DistortionSpec& d, double D);

/// Independent primal oracle: feasible-coupling lattice descent refined to
/// grid_resolution. Desk scale only (|X|*|Xhat| <= 9).
ExtReal rate_primal_bruteforce(const Distribution& T, const Distribution& Q,
                               const DistortionSpec& d, double D, double grid_resolution);

/// R_max(D) = max over source laws T of R(T,Q,D).
ExtReal rate_max(const Distribution& Q, const DistortionSpec& d, double D);

}  // namespace rcexp

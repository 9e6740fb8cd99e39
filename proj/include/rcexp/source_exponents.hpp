#pragma once

#include <vector>

#include "rcexp/core.hpp"
#include "rcexp/rate.hpp"

namespace rcexp {

/// An exponent sampled on an ascending rate grid.
struct ExponentCurve {
    std::vector<double> rates;   // strictly ascending, nats
    std::vector<ExtReal> values;

    ExponentCurve(std::vector<double> rates_, std::vector<ExtReal> values_);
};

/// Encoding success exponent, explicit form:
///   sup_{0<=rho<=1} sup_{s>=0} { E0(s,rho,Q,D) - rho R }.
double es_explicit(const SourceProblem& problem, double R);

/// Encoding success exponent, implicit form (simplex-grid oracle):
///   min_T { D(T||P) + |R(T,Q,D) - R|^+ }.  |X| <= 4.
double es_implicit(const SourceProblem& problem, double R, double grid_resolution);

/// Encoding failure exponent, implicit form:
///   min over {T : R(T,Q,D) >= R} of D(T||P); +inf for R > R_max(D).
ExtReal ef_implicit(const SourceProblem& problem, double R, double grid_resolution);

/// ef_implicit with a caller-chosen alphabet limit (joint channel alphabets
/// go up to 9).
ExtReal ef_implicit_limited(const SourceProblem& problem, double R, double grid_resolution,
                            std::size_t alphabet_limit);

/// Lower convex envelope of the failure exponent, explicit form:
///   sup_{rho>=0} inf_{s>=0} { E0(s,-rho,Q,D) + rho R }.
/// Equals l.c.e.{E_f} for D >= max_x min_xh d; gives 0 below that threshold.
double ef_explicit_lce(const SourceProblem& problem, double R);

/// Greatest convex minorant of a sampled curve (lower hull); a +inf tail acts
/// as a vertical constraint at the last finite rate.
ExponentCurve lower_convex_envelope(const ExponentCurve& curve);

}  // namespace rcexp

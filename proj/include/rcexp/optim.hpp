#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rcexp/core.hpp"

namespace rcexp {

/// Worker-pool width for the parallel kernels. Defaults to the OpenMP
/// maximum, overridable by the RCEXP_JOBS environment variable.
int num_threads();
void set_num_threads(int n);

struct ScalarMaxResult {
    double x = 0.0;
    double value = -kInf;
    bool diverged = false;  // objective still climbing at the search limit
};

/// Golden-section maximization on [a, b]; endpoints are always evaluated.
/// Exact for concave objectives, a robust local polish otherwise.
ScalarMaxResult golden_max(const std::function<double(double)>& f, double a, double b,
                           double x_tol = 1e-10, int max_iter = 200);

/// sup_{x >= 0} f(x) with a geometrically grown bracket (doubling from 1).
/// If f keeps increasing past x_limit the result is flagged diverged and
/// holds the value at the limit.
ScalarMaxResult grow_and_max(const std::function<double(double)>& f, double x_limit,
                             double x_tol = 1e-10);

/// Coarse scan over [a, b] at `scan_points`, then golden polish around the
/// best few scan cells. For objectives with no concavity certificate.
ScalarMaxResult scan_and_max(const std::function<double(double)>& f, double a, double b,
                             int scan_points, double x_tol = 1e-10);

/// All compositions of `k` into `dim` nonnegative parts, lexicographic order.
/// Materialized so parallel loops can index them deterministically.
std::vector<std::vector<int>> compositions(int k, std::size_t dim);

/// Number of compositions of k into dim parts (for scale checks).
double composition_count(int k, std::size_t dim);

struct SimplexMinResult {
    std::vector<double> point;
    double value = kInf;
};

/// Minimize f over the probability simplex: barycentric lattice at step
/// 1/coarse_k, then shrinking coordinate-exchange refinement of the best
/// `polish_starts` lattice cells down to step `final_step`.
/// Runs the lattice scan in parallel when `parallel` is set; the result is
/// deterministic either way (ties broken toward the lowest lattice index).
SimplexMinResult minimize_on_simplex(const std::function<double(const std::vector<double>&)>& f,
                                     std::size_t dim, int coarse_k, double final_step,
                                     int polish_starts = 4, bool parallel = true);

/// Serial reference for minimize_on_simplex, kept for testing the parallel path.
SimplexMinResult minimize_on_simplex_serial(
    const std::function<double(const std::vector<double>&)>& f, std::size_t dim, int coarse_k,
    double final_step, int polish_starts = 4);

/// Coordinate-exchange descent from `start` on the simplex, halving the step
/// from `initial_step` to `final_step`.
SimplexMinResult polish_on_simplex(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> start, double initial_step,
                                   double final_step);

}  // namespace rcexp

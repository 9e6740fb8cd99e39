#pragma once

#include <cstdint>
#include <vector>

#include "rcexp/channel_problem.hpp"
#include "rcexp/core.hpp"

namespace testutil {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Rng {
    std::uint64_t state;
    double uniform() {
        state = splitmix64(state);
        return (state >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int index(int n) { return static_cast<int>(uniform() * n) % n; }
};

inline rcexp::Distribution random_distribution(Rng& rng, std::size_t n, double floor_w = 0.02) {
    std::vector<double> w(n);
    double s = 0;
    for (double& v : w) {
        v = floor_w + rng.uniform();
        s += v;
    }
    for (double& v : w) v /= s;
    return rcexp::Distribution(std::move(w));
}

inline std::vector<std::vector<double>> random_matrix(Rng& rng, std::size_t r, std::size_t c) {
    std::vector<std::vector<double>> m(r, std::vector<double>(c));
    for (auto& row : m)
        for (double& v : row) v = rng.uniform();
    return m;
}

inline rcexp::ChannelProblem random_channel(Rng& rng, std::size_t nx, std::size_t ny, double D,
                                            double floor_w = 0.05) {
    std::vector<rcexp::Distribution> rows;
    for (std::size_t x = 0; x < nx; ++x) rows.push_back(random_distribution(rng, ny, floor_w));
    return rcexp::ChannelProblem(random_distribution(rng, nx, floor_w),
                                 rcexp::ConditionalDistribution(rows), D);
}

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

inline rcexp::DistortionSpec hamming2() {
    return rcexp::DistortionSpec({{0.0, 1.0}, {1.0, 0.0}});
}

inline rcexp::DistortionSpec hamming2_rational() {
    using rcexp::Rational;
    return rcexp::DistortionSpec({{0.0, 1.0}, {1.0, 0.0}},
                                 {{Rational{0, 1}, Rational{1, 1}},
                                  {Rational{1, 1}, Rational{0, 1}}});
}

}  // namespace testutil

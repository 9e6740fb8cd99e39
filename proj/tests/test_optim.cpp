#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rcexp/optim.hpp"

using namespace rcexp;
using testutil::Rng;

TEST_CASE("golden_max on a concave parabola") {
    auto f = [](double x) { return -(x - 1.3) * (x - 1.3) + 2.0; };
    ScalarMaxResult r = golden_max(f, 0.0, 4.0);
    CHECK(r.x == doctest::Approx(1.3).epsilon(1e-7));
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(r.diverged);
}

TEST_CASE("golden_max keeps the better endpoint") {
    auto f = [](double x) { return x; };
    ScalarMaxResult r = golden_max(f, 0.0, 5.0);
    CHECK(r.value == doctest::Approx(5.0));
}

TEST_CASE("grow_and_max finds interior maxima and flags divergence") {
    ScalarMaxResult r = grow_and_max([](double x) { return -(x - 100.0) * (x - 100.0); }, 1e6);
    CHECK(r.x == doctest::Approx(100.0).epsilon(1e-6));
    CHECK_FALSE(r.diverged);

    ScalarMaxResult div = grow_and_max([](double x) { return x; }, 1024.0);
    CHECK(div.diverged);
}

TEST_CASE("scan_and_max beats a single golden pass on a bimodal objective") {
    auto f = [](double x) {
        return std::exp(-40.0 * (x - 0.15) * (x - 0.15)) +
               1.4 * std::exp(-40.0 * (x - 0.85) * (x - 0.85));
    };
    ScalarMaxResult r = scan_and_max(f, 0.0, 1.0, 41);
    CHECK(r.x == doctest::Approx(0.85).epsilon(1e-4));
}

TEST_CASE("compositions enumerate the full lattice") {
    auto cs = compositions(3, 2);
    CHECK(cs.size() == 4);
    CHECK(composition_count(3, 2) == doctest::Approx(4.0));
    CHECK(composition_count(10, 4) == doctest::Approx(286.0));
    CHECK(compositions(10, 4).size() == 286);
    for (const auto& c : compositions(5, 3)) {
        int s = 0;
        for (int v : c) s += v;
        CHECK(s == 5);
    }
}

TEST_CASE("parallel simplex minimization matches the serial reference") {
    Rng rng{21};
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> center(3);
        double s = 0;
        for (double& c : center) {
            c = 0.1 + rng.uniform();
            s += c;
        }
        for (double& c : center) c /= s;
        auto f = [center](const std::vector<double>& t) {
            double v = 0;
            for (std::size_t i = 0; i < t.size(); ++i) v += (t[i] - center[i]) * (t[i] - center[i]);
            return v;
        };
        SimplexMinResult par = minimize_on_simplex(f, 3, 60, 1e-7);
        SimplexMinResult ser = minimize_on_simplex_serial(f, 3, 60, 1e-7);
        CHECK(par.value == doctest::Approx(ser.value).epsilon(1e-12));
        for (int i = 0; i < 3; ++i) CHECK(par.point[i] == doctest::Approx(ser.point[i]));
        CHECK(par.value <= 1e-10);  // the quadratic bowl's minimum is in the simplex
    }
}

TEST_CASE("polish_on_simplex descends to a boundary optimum") {
    auto f = [](const std::vector<double>& t) { return 1.0 - t[0]; };
    SimplexMinResult r = polish_on_simplex(f, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.25, 1e-8);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r.point[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("thread pool width respects set_num_threads") {
    const int saved = num_threads();
    set_num_threads(2);
    CHECK(num_threads() == 2);
    set_num_threads(saved);
    CHECK(num_threads() == saved);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rcexp/rate.hpp"
#include "rcexp/source_exponents.hpp"

using namespace rcexp;
using testutil::Rng;

namespace {

SourceProblem binary_reference(double D) {
    return SourceProblem(Distribution({0.8, 0.2}), Distribution::uniform(2), testutil::hamming2(),
                         D);
}

// O(n^2) chord oracle for the convex envelope at the sample points
std::vector<double> lce_bruteforce(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    std::vector<double> out(n);
    // the envelope at x_i is the min over all chords covering x_i
    for (std::size_t i = 0; i < n; ++i) {
        double best = ys[i];
        for (std::size_t a = 0; a <= i; ++a)
            for (std::size_t b = i; b < n; ++b) {
                if (a == b) continue;
                const double lam = (xs[i] - xs[a]) / (xs[b] - xs[a]);
                best = std::min(best, (1 - lam) * ys[a] + lam * ys[b]);
            }
        out[i] = best;
    }
    return out;
}

}  // namespace

TEST_CASE("es_explicit vanishes when the threshold is slack or the rate is high") {
    Rng rng{51};
    for (int i = 0; i < 10; ++i) {
        DistortionSpec d(testutil::random_matrix(rng, 2, 2));
        SourceProblem sp(testutil::random_distribution(rng, 2),
                         testutil::random_distribution(rng, 2), d, d.max_value() + 0.1);
        CHECK(es_explicit(sp, rng.uniform(0, 2)) == doctest::Approx(0.0).epsilon(1e-10));
    }

    SourceProblem ref = binary_reference(0.25);
    const double rp = rate(ref.P, ref.Q, ref.d, ref.D).rate.value();
    CHECK(es_explicit(ref, rp + 1e-6) == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(es_explicit(ref, rp + 0.3) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("es explicit and implicit agree on the symmetric binary instance") {
    SourceProblem sp(Distribution::uniform(2), Distribution::uniform(2), testutil::hamming2(),
                     0.25);
    const double expl = es_explicit(sp, 0.05);
    const double impl = es_implicit(sp, 0.05, 1e-3);
    CHECK(std::abs(expl - impl) <= 1e-3);
    CHECK(expl > 0.0);
}

TEST_CASE("es_implicit is zero at slack thresholds and when T=P is uncharged") {
    SourceProblem sp = binary_reference(1.5);
    CHECK(es_implicit(sp, 0.1, 1e-2) == doctest::Approx(0.0).epsilon(1e-9));
    SourceProblem sp2 = binary_reference(0.25);
    const double rp = rate(sp2.P, sp2.Q, sp2.d, sp2.D).rate.value();
    CHECK(es_implicit(sp2, rp + 0.05, 1e-2) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("es_explicit is nonincreasing and convex in R") {
    SourceProblem sp = binary_reference(0.1);
    std::vector<double> vals;
    for (int i = 0; i <= 20; ++i) vals.push_back(es_explicit(sp, i * 0.03));
    for (std::size_t i = 1; i < vals.size(); ++i) CHECK(vals[i] <= vals[i - 1] + 1e-9);
    for (std::size_t i = 1; i + 1 < vals.size(); ++i)
        CHECK(vals[i] <= 0.5 * (vals[i - 1] + vals[i + 1]) + 1e-9);
}

TEST_CASE("ef_implicit on the constant-rate binary instance is a step to +inf") {
    // Q uniform + Hamming + D=0: R(T,Q,0) = ln 2 for every T
    SourceProblem sp(Distribution({0.8, 0.2}), Distribution::uniform(2), testutil::hamming2(),
                     0.0);
    CHECK(ef_implicit(sp, 0.3, 1e-2).value() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ef_implicit(sp, std::log(2.0) - 1e-9, 1e-2).value() ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ef_implicit(sp, std::log(2.0) + 1e-6, 1e-2).is_inf());
}

TEST_CASE("ef_implicit between R(P) and R_max matches a fine-grid scan") {
    // non-uniform Q, so the rate function genuinely varies with T
    SourceProblem sp(Distribution({0.8, 0.2}), Distribution({0.3, 0.7}), testutil::hamming2(),
                     0.25);
    const double rp = rate(sp.P, sp.Q, sp.d, sp.D).rate.value();
    const double rmax = rate_max(sp.Q, sp.d, sp.D).value();
    REQUIRE(rp < rmax);
    const double R = 0.5 * (rp + rmax);

    const double got = ef_implicit(sp, R, 1e-3).value();

    // independent scan over T = (t, 1-t)
    double best = kInf;
    for (int i = 0; i <= 100000; ++i) {
        const double t = i * 1e-5;
        Distribution T({t, 1.0 - t});
        ExtReal rt = rate(T, sp.Q, sp.d, sp.D).rate;
        if (rt.is_finite() && rt.value() >= R)
            best = std::min(best, kl_divergence(T, sp.P).value());
    }
    CHECK(got == doctest::Approx(best).epsilon(1e-3));
    CHECK(got > 0.0);
    CHECK(ef_implicit(sp, rp - 0.01, 1e-3).value() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ef_implicit(sp, rmax + 0.01, 1e-3).is_inf());
}

TEST_CASE("ef_explicit_lce equals zero below R(P) and zero when D is below max-row-min") {
    SourceProblem sp = binary_reference(0.25);
    const double rp = rate(sp.P, sp.Q, sp.d, sp.D).rate.value();
    CHECK(std::abs(ef_explicit_lce(sp, rp - 0.02)) <= 1e-5);

    // D below max_x min_xh d: envelope collapses even where ef_implicit is positive
    SourceProblem neg(Distribution({0.9, 0.1}), Distribution::uniform(2),
                      DistortionSpec({{0.0, 1.0}, {0.5, 0.3}}), 0.1);
    REQUIRE(neg.D < neg.d.max_row_min());
    const double R = 1.0;
    CHECK(std::abs(ef_explicit_lce(neg, R)) <= 1e-5);
    CHECK(ef_implicit(neg, R, 1e-3).value() >= 0.05);
}

TEST_CASE("ef_explicit_lce matches the numeric envelope of ef_implicit") {
    SourceProblem sp = binary_reference(0.25);
    const double rmax = rate_max(sp.Q, sp.d, sp.D).value();
    std::vector<double> rates;
    std::vector<ExtReal> values;
    for (int i = 0; i <= 120; ++i) {
        const double R = 1e-3 + i * (rmax - 2e-3) / 120.0;
        rates.push_back(R);
        values.push_back(ef_implicit(sp, R, 1e-3));
    }
    ExponentCurve env = lower_convex_envelope(ExponentCurve(rates, values));
    for (std::size_t i = 0; i < rates.size(); ++i) {
        REQUIRE(env.values[i].is_finite());
        CHECK(std::abs(ef_explicit_lce(sp, rates[i]) - env.values[i].value()) <= 2e-3);
        // envelope property
        CHECK(ef_explicit_lce(sp, rates[i]) <= values[i].value() + 1e-3);
    }
}

TEST_CASE("lower_convex_envelope utility") {
    // convex input is a fixed point
    ExponentCurve conv({0, 1, 2, 3}, {ExtReal(3.0), ExtReal(1.5), ExtReal(1.0), ExtReal(2.0)});
    ExponentCurve out = lower_convex_envelope(conv);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(out.values[i].value() == doctest::Approx(conv.values[i].value()));

    // a dip between two linear pieces collapses to the chord
    ExponentCurve dip({0, 1, 2}, {ExtReal(0.0), ExtReal(2.0), ExtReal(1.0)});
    ExponentCurve hull = lower_convex_envelope(dip);
    CHECK(hull.values[1].value() == doctest::Approx(0.5));

    // random piecewise curves vs the O(n^2) chord oracle
    Rng rng{52};
    for (int t = 0; t < 20; ++t) {
        std::vector<double> xs, ys;
        std::vector<ExtReal> ev;
        double x = 0;
        for (int i = 0; i < 15; ++i) {
            x += 0.1 + rng.uniform();
            xs.push_back(x);
            ys.push_back(rng.uniform(0, 4));
            ev.push_back(ExtReal(ys.back()));
        }
        ExponentCurve h = lower_convex_envelope(ExponentCurve(xs, ev));
        auto oracle = lce_bruteforce(xs, ys);
        for (std::size_t i = 0; i < xs.size(); ++i)
            CHECK(h.values[i].value() == doctest::Approx(oracle[i]).epsilon(1e-9));
    }

    // +inf tail preserved, finite part enveloped against the tail as a wall
    ExponentCurve tail({0, 1, 2, 3},
                       {ExtReal(1.0), ExtReal(0.5), ExtReal(2.0), ExtReal::infinity()});
    ExponentCurve ht = lower_convex_envelope(tail);
    CHECK(ht.values[3].is_inf());
    CHECK(ht.values[1].value() == doctest::Approx(0.5));

    CHECK_THROWS_AS(lower_convex_envelope(ExponentCurve({0.0}, {ExtReal(1.0)})),
                    std::invalid_argument);
}

TEST_CASE("random binary instances: explicit equals implicit (success exponent)") {
    Rng rng{53};
    for (int i = 0; i < 15; ++i) {
        DistortionSpec d(testutil::random_matrix(rng, 2, 2));
        Distribution P = testutil::random_distribution(rng, 2);
        Distribution Q = testutil::random_distribution(rng, 2);
        SourceProblem sp(P, Q, d, rng.uniform(d.min_value() + 0.02, d.max_value()));
        ExtReal rp = rate(P, Q, d, sp.D).rate;
        if (rp.is_inf()) continue;
        const double R = rng.uniform(0.0, 1.2 * std::max(rp.value(), 1e-3));
        CHECK(std::abs(es_explicit(sp, R) - es_implicit(sp, R, 1e-3)) <= 1e-3);
    }
}

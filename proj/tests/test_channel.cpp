#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rcexp/channel.hpp"
#include "rcexp/e0.hpp"
#include "rcexp/optim.hpp"
#include "rcexp/rate.hpp"
#include "rcexp/source_exponents.hpp"

using namespace rcexp;
using testutil::Rng;

TEST_CASE("compile produces a valid composite with zero diagonal-LLR rows") {
    Rng rng{61};
    for (int i = 0; i < 10; ++i) {
        ChannelProblem cp = testutil::random_channel(rng, 3, 2, 0.0);
        CompiledDual cd = compile(cp);
        double mass = 0;
        for (std::size_t i2 = 0; i2 < cd.composite.P.size(); ++i2) mass += cd.composite.P[i2];
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t x = 0; x < cp.num_inputs(); ++x)
            for (std::size_t y = 0; y < cp.num_outputs(); ++y)
                CHECK(cd.composite.d(cd.joint_index(x, y), x) == doctest::Approx(0.0));
    }

    // BSC(0.1): LLR values are 0 and +-ln 9
    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    CompiledDual cd = compile(bsc);
    const double l9 = std::log(9.0);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 2; ++c) {
            const double v = cd.composite.d(r, c);
            const bool known = std::abs(v) <= 1e-12 || std::abs(std::abs(v) - l9) <= 1e-12;
            CHECK(known);
        }
}

TEST_CASE("dmin_q") {
    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    CHECK(dmin_q(bsc) == doctest::Approx(-std::log(9.0)).epsilon(1e-12));

    ChannelProblem pm = make_bsc(0.1, Distribution::point_mass(2, 0), 0.0);
    CHECK(dmin_q(pm) == doctest::Approx(0.0));

    // symmetric channels: minimum is minus the maximal LLR magnitude
    Rng rng{62};
    for (int i = 0; i < 10; ++i) {
        ChannelProblem cp = testutil::random_channel(rng, 2, 3, 0.0);
        double max_mag = 0;
        for (std::size_t y = 0; y < 3; ++y)
            max_mag = std::max(max_mag, std::abs(std::log(cp.channel(0, y) / cp.channel(1, y))));
        CHECK(dmin_q(cp) == doctest::Approx(-max_mag).epsilon(1e-12));
    }
}

TEST_CASE("mutual information identities") {
    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    CHECK(mutual_information(bsc) ==
          doctest::Approx(std::log(2.0) - testutil::binary_entropy(0.1)).epsilon(1e-12));
    CHECK(mutual_information(bsc) == doctest::Approx(0.3680642).epsilon(1e-5));

    // independent rows -> zero
    std::vector<Distribution> rows{Distribution({0.3, 0.7}), Distribution({0.3, 0.7})};
    ChannelProblem indep(Distribution::uniform(2), ConditionalDistribution(rows), 0.0);
    CHECK(mutual_information(indep) == doctest::Approx(0.0).epsilon(1e-12));

    // near-noiseless binary channel approaches ln 2
    ChannelProblem clean = make_bsc(1e-9, Distribution::uniform(2), 0.0);
    CHECK(mutual_information(clean) == doctest::Approx(std::log(2.0)).epsilon(1e-6));

    // R(QoP, Q, 0) = I(QoP) on random channels
    Rng rng{63};
    for (int i = 0; i < 50; ++i) {
        ChannelProblem cp = testutil::random_channel(rng, 2 + rng.index(2), 2 + rng.index(2), 0.0);
        SourceProblem comp = compile(cp).composite;
        RateResult r = rate(comp.P, comp.Q, comp.d, 0.0);
        CHECK(std::abs(r.rate.value() - mutual_information(cp)) <= 1e-6);
    }
}

TEST_CASE("ee vanishes above the composite rate and matches Gallager at D=0") {
    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    const double I = mutual_information(bsc);
    CHECK(ee(bsc, I + 1e-3) == doctest::Approx(0.0).epsilon(1e-6));

    for (double R : {0.0, 0.25 * I, 0.5 * I, I})
        CHECK(std::abs(ee(bsc, R) - gallager_er(bsc, R)) <= 1e-6);

    Rng rng{64};
    for (int i = 0; i < 20; ++i) {
        ChannelProblem cp = testutil::random_channel(rng, 2, 2, 0.0);
        const double Ic = mutual_information(cp);
        for (double R : {0.0, 0.5 * Ic, Ic})
            CHECK(std::abs(ee(cp, R) - gallager_er(cp, R)) <= 1e-6);
    }
}

TEST_CASE("gallager_er endpoints") {
    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    CHECK(gallager_er(bsc, mutual_information(bsc) + 0.01) == doctest::Approx(0.0).epsilon(1e-9));

    // R = 0: value is E0 at rho = 1, -ln sum_y [sum_x Q sqrt(P)]^2
    double s = 0;
    for (int y = 0; y < 2; ++y) {
        double inner = 0;
        for (int x = 0; x < 2; ++x) inner += 0.5 * std::sqrt(bsc.channel(x, y));
        s += inner * inner;
    }
    CHECK(gallager_er(bsc, 0.0) == doctest::Approx(-std::log(s)).epsilon(1e-9));
}

TEST_CASE("forney bound / ee / exact ordering and Lemma-1 equality for D >= 0") {
    Rng rng{65};
    for (int i = 0; i < 25; ++i) {
        const double D = rng.uniform(-0.6, 0.6);
        ChannelProblem cp = testutil::random_channel(rng, 2, 2, D);
        const double R = rng.uniform(0.0, 0.7);
        const double fb = forney_bound(cp, R);
        const double fe = forney_ee(cp, R);
        const double e = ee(cp, R);
        const double mn = std::min(fe, e);
        if (std::isfinite(mn)) CHECK(fb <= mn + 1e-9);
        ForneyExactResult fx = forney_exact(cp, R);
        if (std::isinf(mn)) {
            CHECK(fx.value.is_inf());
        } else {
            CHECK(std::abs(fx.value.value() - std::max(mn, 0.0)) <= 1e-9);
        }
        if (D >= 0.0) CHECK(std::abs(e - fb) <= 1e-6);
    }
}

TEST_CASE("forney_ee diverges for 0 < R < -D at a degenerate codebook distribution") {
    ChannelProblem cp = make_bsc(0.1, Distribution::point_mass(2, 0), -0.5);
    CHECK(std::isinf(forney_ee(cp, 0.1)));
    CHECK(std::isfinite(forney_bound(cp, 0.1)));
    CHECK(forney_exact(cp, 0.1).value.is_inf());
    // at a fixed interior codebook distribution the same formula stays finite
    ChannelProblem u = make_bsc(0.1, Distribution::uniform(2), -0.5);
    CHECK(std::isfinite(forney_ee(u, 0.1)));
}

TEST_CASE("forney_exact flags the excluded points") {
    ChannelProblem cp = make_bsc(0.1, Distribution::uniform(2), -0.2);
    CHECK(forney_exact(cp, 0.2).exceptional);
    CHECK_FALSE(forney_exact(cp, 0.35).exceptional);
    ChannelProblem at_dmin = cp.with_threshold(dmin_q(cp));
    CHECK(forney_exact(at_dmin, 0.1).exceptional);
}

TEST_CASE("forney_exact equals Gallager at D=0") {
    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    CHECK(forney_exact(bsc, 0.1).value.value() ==
          doctest::Approx(gallager_er(bsc, 0.1)).epsilon(1e-6));
}

TEST_CASE("ml correct-decoding chain on binary instances") {
    Rng rng{66};
    for (int i = 0; i < 4; ++i) {
        ChannelProblem cp = testutil::random_channel(rng, 2, 2, 0.0);
        const double I = mutual_information(cp);
        CHECK(ml_correct_exponent(cp, 0.8 * I) == doctest::Approx(0.0).epsilon(1e-8));

        const double R = I + rng.uniform(0.05, 0.4);
        const double expl = ml_correct_exponent(cp, R);
        CHECK(std::abs(expl - ml_correct_implicit_t(cp, R, 1e-2)) <= 2e-3);
        CHECK(std::abs(expl - ml_correct_implicit_uw(cp, R, 1e-2)) <= 2e-3);
        CHECK(dueck_korner_bound(cp, R, 1e-2) >= expl - 1e-6);

        // 1-Lipschitz in R
        const double delta = 0.07;
        CHECK(ml_correct_exponent(cp, R + delta) <= expl + delta + 1e-9);
        CHECK(ml_correct_exponent(cp, R + delta) >= expl - 1e-9);
    }
}

TEST_CASE("dueck_korner_bound is zero below mutual information") {
    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    CHECK(dueck_korner_bound(bsc, 0.5 * mutual_information(bsc), 1e-2) <= 1e-6);
}

TEST_CASE("strict correct-decoding exponent vs its envelope") {
    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    const double I = mutual_information(bsc);
    CHECK(std::abs(ec_star_implicit(bsc, 0.5 * I, 1e-2).value()) <= 1e-8);
    CHECK(std::abs(ec_star_lce(bsc, 0.5 * I)) <= 1e-5);

    // envelope never exceeds the implicit value
    for (double R : {I + 0.1, I + 0.25}) {
        ExtReal impl = ec_star_implicit(bsc, R, 1e-2);
        if (impl.is_finite()) CHECK(ec_star_lce(bsc, R) <= impl.value() + 1e-3);
    }

    // D < 0: envelope collapses to zero while the implicit form stays positive
    ChannelProblem neg = bsc.with_threshold(-0.15);
    SourceProblem comp = compile(neg).composite;
    const double rp = rate(comp.P, comp.Q, comp.d, neg.D).rate.value();
    REQUIRE(std::isfinite(rp));
    const double Rn = rp + 0.15;
    CHECK(std::abs(ec_star_lce(neg, Rn)) <= 1e-5);
    ExtReal impl_neg = ec_star_implicit(neg, Rn, 1e-2);
    REQUIRE(impl_neg.is_finite());
    CHECK(impl_neg.value() > 1e-3);
}

TEST_CASE("ml and strict correct exponents coincide where the slope stays below 1") {
    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    const double I = mutual_information(bsc);
    for (double R : {I + 0.05, I + 0.1}) {
        const double slope =
            (ml_correct_exponent(bsc, R + 0.01) - ml_correct_exponent(bsc, R - 0.01)) / 0.02;
        if (slope <= 0.9) {
            ExtReal strict = ec_star_implicit(bsc, R, 1e-2);
            REQUIRE(strict.is_finite());
            CHECK(std::abs(strict.value() - ml_correct_exponent(bsc, R)) <= 5e-3);
        }
    }
}

TEST_CASE("maximize_over_q") {
    // symmetric channel: returned value at least matches uniform Q
    ChannelProblem bsc = make_bsc(0.1, Distribution::uniform(2), 0.0);
    auto objective = [](const ChannelProblem& cp) { return ee(cp, 0.1); };
    QMaxResult qr = maximize_over_q(objective, bsc.channel, 0.0, 6);
    CHECK(qr.value >= ee(bsc, 0.1) - 1e-6);

    // 1-D sweep oracle over Q = (q, 1-q)
    double sweep_best = -kInf;
    for (int i = 1; i < 1000; ++i) {
        const double q = i * 1e-3;
        ChannelProblem cp(Distribution({q, 1 - q}), bsc.channel, 0.0);
        sweep_best = std::max(sweep_best, ee(cp, 0.1));
    }
    CHECK(qr.value >= sweep_best - 1e-3);
}

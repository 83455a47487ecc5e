#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fiberlink/noise.hpp"
#include "fiberlink/stability.hpp"
#include "oracles.hpp"

using namespace fiberlink;

TEST_CASE("alternating series: adev(1 s) = a*sqrt(2)") {
    const double a = 3e-16;
    std::vector<double> y(1000);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i % 2) ? a : -a;
    StabilityCurve c = adev(make_series(y), {1.0});
    REQUIRE(c.size() == 1);
    CHECK(c.values[0] == doctest::Approx(a * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("constant series: zero at all taus") {
    FreqSeries s = make_series(std::vector<double>(5000, 4.2e-16));
    for (const auto& c : {adev(s, {1, 2, 5, 10, 100}), mdev(s, {1, 2, 5, 10, 100})})
        for (double v : c.values) CHECK(std::abs(v) < 1e-25);
}

TEST_CASE("sinusoidal FM matches the closed form on the main lobe") {
    const double y0 = 1e-15, fm = 1e-3;
    const std::size_t n = 100000;  // 100 modulation periods
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = y0 * std::sin(2.0 * M_PI * fm * static_cast<double>(i) + 0.3);
    FreqSeries s = make_series(y);
    const std::vector<double> taus{100, 200, 300, 400, 500};
    StabilityCurve c = adev(s, taus);
    REQUIRE(c.size() == taus.size());
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const double expect = sinusoid_fm_adev(y0, fm, taus[k]);
        CHECK(c.values[k] == doctest::Approx(expect).epsilon(0.02));
    }
}

TEST_CASE("sinusoid_fm_adev special points") {
    const double y0 = 1.0, fm = 1.0 / 86400.0;
    CHECK(sinusoid_fm_adev(y0, fm, 0.5 / fm) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
    CHECK(sinusoid_fm_adev(y0, fm, 1.0 / fm) == doctest::Approx(0.0).epsilon(1e-12));
    // daily thermal amplitude of the five-meter interconnect
    CHECK(sinusoid_fm_adev(1.07e-17, fm, 20000.0) == doctest::Approx(6.5e-18).epsilon(0.01));
    CHECK_THROWS_AS(sinusoid_fm_adev(1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("white FM: overlapping matches non-overlapping brute force") {
    NoiseSpec spec;
    spec.h_alpha(0) = 2e-30;
    spec.seed = 555;
    FreqSeries s = gen_power_law(spec, 100000, 1.0);
    for (std::size_t m : {1u, 4u, 16u, 64u}) {
        const double over = adev(s, {static_cast<double>(m)}).values[0];
        const double naive = oracle::adev_nonoverlapping(s.y, m);
        CHECK(over / naive > 0.8);
        CHECK(over / naive < 1.2);
    }
}

TEST_CASE("scaling: adev(c*s) = |c| adev(s), exact for power-of-two factors") {
    FreqSeries s = make_series(std::vector<double>(3000, 0.0));
    oracle::Rng rng(10);
    for (auto& v : s.y) v = 1e-16 * rng.gauss();
    const std::vector<double> taus{1, 2, 5, 10, 50};
    StabilityCurve base = adev(s, taus);
    for (double c : {2.0, -4.0, 0.5}) {
        FreqSeries scaled = s;
        for (auto& v : scaled.y) v *= c;
        StabilityCurve got = adev(scaled, taus);
        for (std::size_t k = 0; k < taus.size(); ++k)
            CHECK(got.values[k] == std::abs(c) * base.values[k]);  // bitwise
    }
    for (double c : {3.0, -0.7}) {
        FreqSeries scaled = s;
        for (auto& v : scaled.y) v *= c;
        StabilityCurve got = mdev(scaled, taus);
        StabilityCurve basem = mdev(s, taus);
        for (std::size_t k = 0; k < taus.size(); ++k)
            CHECK(got.values[k] == doctest::Approx(std::abs(c) * basem.values[k]).epsilon(1e-12));
    }
}

TEST_CASE("time reversal leaves adev unchanged on gap-free series") {
    oracle::Rng rng(11);
    FreqSeries s = make_series(std::vector<double>(4000, 0.0));
    for (auto& v : s.y) v = 1e-16 * rng.gauss();
    FreqSeries r = s;
    std::reverse(r.y.begin(), r.y.end());
    const std::vector<double> taus{1, 2, 5, 10, 20, 50};
    StabilityCurve a = adev(s, taus), b = adev(r, taus);
    for (std::size_t k = 0; k < taus.size(); ++k)
        CHECK(a.values[k] == doctest::Approx(b.values[k]).epsilon(1e-12));
}

TEST_CASE("gaps only remove terms, never change surviving ones") {
    oracle::Rng rng(12);
    FreqSeries s = make_series(std::vector<double>(3000, 0.0));
    for (auto& v : s.y) v = 1e-16 * rng.gauss();

    FreqSeries gappy = s;
    for (std::size_t i = 1000; i < 1040; ++i) gappy.valid[i] = 0;
    for (std::size_t i = 2100; i < 2105; ++i) gappy.valid[i] = 0;

    for (std::size_t m : {1u, 3u, 10u}) {
        const double tau = static_cast<double>(m);
        // recompute the full-series estimator restricted to the terms that
        // survive in the gappy series; they must agree
        StabilityCurve cg = adev(gappy, {tau});
        REQUIRE(cg.size() == 1);

        double sum2 = 0.0;
        std::size_t terms = 0;
        for (std::size_t j = 0; j + 2 * m <= s.size(); ++j) {
            bool ok = true;
            for (std::size_t i = j; i < j + 2 * m; ++i) ok &= (gappy.valid[i] != 0);
            if (!ok) continue;
            double a0 = 0, a1 = 0;
            for (std::size_t i = j; i < j + m; ++i) a0 += s.y[i];
            for (std::size_t i = j + m; i < j + 2 * m; ++i) a1 += s.y[i];
            const double z = (a1 - a0) / static_cast<double>(m);
            sum2 += z * z;
            ++terms;
        }
        CHECK(cg.counts[0] == terms);
        CHECK(cg.values[0] ==
              doctest::Approx(std::sqrt(sum2 / (2.0 * static_cast<double>(terms)))).epsilon(1e-9));

        StabilityCurve full = adev(s, {tau});
        CHECK(cg.counts[0] < full.counts[0]);
    }
}

TEST_CASE("mdev equals adev at m=1 and keeps the white-FM ratio at large m") {
    NoiseSpec spec;
    spec.h_alpha(0) = 2e-30;
    spec.seed = 77;
    FreqSeries s = gen_power_law(spec, 1 << 19, 1.0);
    StabilityCurve a = adev(s, {1.0, 64.0});
    StabilityCurve m = mdev(s, {1.0, 64.0});
    CHECK(m.values[0] == doctest::Approx(a.values[0]).epsilon(1e-9));
    // white FM: mod sigma^2 / sigma^2 -> 1/2 for large m
    CHECK(m.values[1] / a.values[1] == doctest::Approx(std::sqrt(0.5)).epsilon(0.10));
}

TEST_CASE("taus that cannot be estimated are omitted with warnings") {
    FreqSeries s = make_series(std::vector<double>(10, 1e-16));
    StabilityCurve c = adev(s, {1.0, 4.0, 100.0});
    CHECK(c.size() == 2);  // tau=100 needs 201 samples
    CHECK(c.warnings.size() == 1);
    CHECK_THROWS_AS(adev(s, {1.5}), std::invalid_argument);  // non-integer m

    FreqSeries gap = make_series(std::vector<double>(30, 1e-16));
    for (std::size_t i = 0; i < 30; ++i) gap.valid[i] = (i % 2) ? 0 : 1;
    StabilityCurve cg = adev(gap, {2.0});
    CHECK(cg.size() == 0);  // every 4-sample window touches a hole
    CHECK(cg.warnings.size() == 1);
}

TEST_CASE("default tau grid is 1-2-5 per decade") {
    const auto taus = default_taus(1.0, 100.0);
    const std::vector<double> expect{1, 2, 5, 10, 20, 50, 100};
    REQUIRE(taus.size() == expect.size());
    for (std::size_t i = 0; i < taus.size(); ++i) CHECK(taus[i] == doctest::Approx(expect[i]));
}

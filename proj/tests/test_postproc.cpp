#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fiberlink/noise.hpp"
#include "fiberlink/postproc.hpp"
#include "oracles.hpp"

using namespace fiberlink;

namespace {

// Clean white-FM record with labeled injected outliers and one anomalous
// noise segment; the ground-truth bad set is returned alongside.
struct LabeledFixture {
    FreqSeries series;
    std::vector<std::uint8_t> is_bad;
};

LabeledFixture make_fixture(std::size_t n, double sigma, std::uint64_t seed) {
    oracle::Rng rng(seed);
    FreqSeries s = make_series(std::vector<double>(n, 0.0), 1.0, 0.0, 194.4e12);
    for (auto& v : s.y) v = sigma * rng.gauss();
    std::vector<std::uint8_t> bad(n, 0);

    // one two-hour segment of twenty-fold noise
    const std::size_t seg_start = n / 3, seg_len = 7200;
    for (std::size_t i = seg_start; i < seg_start + seg_len; ++i) {
        s.y[i] = 20.0 * sigma * rng.gauss();
        bad[i] = 1;
    }
    // 100 isolated outliers above 10 sigma, away from the segment
    std::size_t placed = 0;
    while (placed < 100) {
        const auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - 20)) + 10;
        if (bad[idx] || (idx >= seg_start - 10 && idx < seg_start + seg_len + 10)) continue;
        const double mag = (25.0 + 25.0 * rng.uniform()) * sigma;
        s.y[idx] += (rng.uniform() < 0.5 ? 1.0 : -1.0) * mag;
        bad[idx] = 1;
        ++placed;
    }
    return {s, bad};
}

}  // namespace

TEST_CASE("coarse filter basics") {
    FreqSeries clean = make_series(std::vector<double>(1000, 0.0), 1.0, 0.0, 194.4e12);
    oracle::Rng rng(8);
    for (auto& v : clean.y) v = 1e-16 * rng.gauss();
    auto [kept, q] = coarse_filter(clean, 10.0);
    CHECK(uptime_fraction(q) == doctest::Approx(1.0));

    FreqSeries out = clean;
    out.y[100] = 25.0 / 194.4e12;
    out.y[500] = -25.0 / 194.4e12;
    out.y[800] = 25.0 / 194.4e12;
    auto [kept2, q2] = coarse_filter(out, 10.0);
    CHECK(out.size() - kept2.valid_count() == 3);
    CHECK(q2.bits[100] == 0);
    CHECK(q2.bits[500] == 0);
    CHECK(q2.bits[800] == 0);

    CHECK_THROWS_AS(coarse_filter(clean, 0.0), std::invalid_argument);
}

TEST_CASE("a single cycle slip sits exactly on the 1 Hz boundary") {
    // hop = 1/(gate nu0) in y, i.e. exactly one cycle per gate = 1 Hz
    FreqSeries quiet = make_series(std::vector<double>(100, 0.0), 1.0, 0.0, 194.4e12);
    FreqSeries slipped = inject_cycle_slips(quiet, {{50, 1}});

    auto [kept_eq, q_eq] = coarse_filter(slipped, 1.0);
    CHECK(q_eq.bits[50] == 1);  // |df| = 1.0 Hz is not > 1.0 Hz: borderline kept

    auto [kept_lt, q_lt] = coarse_filter(slipped, 0.999);
    CHECK(q_lt.bits[50] == 0);  // any real noise pushes it over; removed

    // on top of noise the hop leaves the band about half the time; with a
    // tighter band it always leaves
    oracle::Rng rng(9);
    FreqSeries noisy = quiet;
    for (auto& v : noisy.y) v = 4e-17 * rng.gauss();
    noisy = inject_cycle_slips(noisy, {{50, 1}});
    auto [kept_n, q_n] = coarse_filter(noisy, 0.5);
    CHECK(q_n.bits[50] == 0);
}

TEST_CASE("rolling-median center tracks a slow drift") {
    FreqSeries s = make_series(std::vector<double>(4000, 0.0), 1.0, 0.0, 194.4e12);
    oracle::Rng rng(10);
    for (std::size_t i = 0; i < s.size(); ++i)
        s.y[i] = (2.0 / 194.4e12) * std::sin(2.0 * M_PI * i / 4000.0) + 1e-17 * rng.gauss();
    // fixed center rejects the drift extremes, rolling median follows them
    auto [kf, qf_fixed] = coarse_filter(s, 1.0, 0.0);
    auto [kr, qf_roll] = coarse_filter(s, 1.0, 0.0, 600.0);
    CHECK(uptime_fraction(qf_fixed) < 0.9);
    CHECK(uptime_fraction(qf_roll) > 0.99);
}

TEST_CASE("three-observable selection keeps clean data") {
    oracle::Rng rng(11);
    FreqSeries s = make_series(std::vector<double>(100000, 0.0), 1.0, 0.0, 194.4e12);
    for (auto& v : s.y) v = 4e-17 * rng.gauss();
    SelectionConfig cfg;
    SelectionResult r = three_observable_select(s, cfg);
    CHECK(uptime_fraction(r.final_mask) > 0.99);
}

TEST_CASE("labeled injection: bad removed, clean kept, idempotent") {
    LabeledFixture fx = make_fixture(12 * 86400, 4e-17, 2024);  // twelve days
    SelectionConfig cfg;
    SelectionResult r = three_observable_select(fx.series, cfg);

    std::size_t bad_total = 0, bad_removed = 0, clean_total = 0, clean_removed = 0;
    for (std::size_t i = 0; i < fx.series.size(); ++i) {
        if (fx.is_bad[i]) {
            ++bad_total;
            if (!r.final_mask.bits[i]) ++bad_removed;
        } else {
            ++clean_total;
            if (!r.final_mask.bits[i]) ++clean_removed;
        }
    }
    CHECK(static_cast<double>(bad_removed) / static_cast<double>(bad_total) >= 0.99);
    CHECK(static_cast<double>(clean_removed) / static_cast<double>(clean_total) <= 0.01);

    // final mask is contained in every per-step mask
    for (std::size_t i = 0; i < fx.series.size(); ++i) {
        if (!r.final_mask.bits[i]) continue;
        CHECK(r.mask_coarse.bits[i] == 1);
        CHECK(r.mask_mean.bits[i] == 1);
        CHECK(r.mask_std.bits[i] == 1);
        CHECK(r.mask_qf.bits[i] == 1);
    }

    // second pass removes almost nothing
    FreqSeries selected = apply_mask(fx.series, r.final_mask);
    SelectionResult r2 = three_observable_select(selected, cfg);
    std::size_t second = 0;
    for (std::size_t i = 0; i < selected.size(); ++i)
        if (selected.valid[i] && !r2.final_mask.bits[i]) ++second;
    CHECK(static_cast<double>(second) / static_cast<double>(selected.valid_count()) < 0.001);
}

TEST_CASE("cycle slips stand 20+ sigma above the short-link noise and get caught") {
    oracle::Rng rng(31);
    const std::size_t n = 200000;
    FreqSeries s = make_series(std::vector<double>(n, 0.0), 1.0, 0.0, 194.4e12);
    for (auto& v : s.y) v = 2.3e-16 * rng.gauss();
    std::vector<std::pair<std::size_t, int>> slips;
    for (std::size_t k = 0; k < 50; ++k)
        slips.emplace_back(3000 + k * 3800, (k % 2) ? 1 : -1);
    FreqSeries slipped = inject_cycle_slips(s, slips);

    SelectionConfig cfg;
    SelectionResult r = three_observable_select(slipped, cfg);
    std::size_t caught = 0;
    for (const auto& [idx, sign] : slips) caught += !r.final_mask.bits[idx];
    CHECK(caught >= 48);  // at least 95 percent of the slipped samples
    CHECK(uptime_fraction(r.final_mask) > 0.99);
}

TEST_CASE("selection rejects degenerate input") {
    FreqSeries s = make_series(std::vector<double>(100, 1.0));
    SelectionConfig cfg;  // windows longer than the record
    CHECK_THROWS_AS(three_observable_select(s, cfg), std::invalid_argument);

    FreqSeries dead = make_series(std::vector<double>(200000, 1.0));
    for (auto& v : dead.valid) v = 0;
    CHECK_THROWS_AS(three_observable_select(dead, cfg), std::invalid_argument);
}

TEST_CASE("uptime report") {
    const std::size_t n = 500000;
    oracle::Rng rng(55);
    auto bernoulli = [&](double p) {
        ValidityMask m{0.0, 1.0, std::vector<std::uint8_t>(n, 1)};
        if (p < 1.0)
            for (auto& b : m.bits) b = rng.uniform() < p ? 1 : 0;
        return m;
    };
    std::vector<std::pair<std::string, ValidityMask>> masks{
        {"stabilized-30m", bernoulli(1.0)},
        {"short-5m", bernoulli(0.985)},
        {"hybrid-43km", bernoulli(0.95)},
        {"cascaded-1410km", bernoulli(0.963)},
    };
    UptimeReport rep = uptime(masks);
    CHECK(rep.combined == doctest::Approx(0.9011).epsilon(0.006));
    for (const auto& [label, u] : rep.per_element) CHECK(rep.combined <= u + 1e-12);

    // identical masks: combined equals the element uptime
    auto m = bernoulli(0.9);
    UptimeReport same = uptime({{"a", m}, {"b", m}});
    CHECK(same.combined == doctest::Approx(same.per_element[0].second));

    // complementary masks: combined zero
    ValidityMask pos{0.0, 1.0, {1, 0, 1, 0}};
    ValidityMask negm{0.0, 1.0, {0, 1, 0, 1}};
    CHECK(uptime({{"a", pos}, {"b", negm}}).combined == 0.0);
}

TEST_CASE("uptime product") {
    CHECK(uptime_product(std::vector<double>(6, 0.5)) == doctest::Approx(0.015625));
    CHECK(uptime_product({0.9, 0.0, 0.99}) == 0.0);
    CHECK(uptime_product({0.77}) == doctest::Approx(0.77));
    CHECK_THROWS_AS(uptime_product({1.2}), std::invalid_argument);
}

TEST_CASE("budget combination") {
    UncertaintyBudget b;
    b.entries = {{"cascaded", -4.8e-20, 9e-20}, {"hybrid", 4.2e-21, 8e-22}};
    b.policy = BudgetPolicy::Quadrature;
    BudgetTotal t = combine_budget(b);
    CHECK(t.quadrature == doctest::Approx(9.0004e-20).epsilon(1e-4));
    CHECK(t.bias == doctest::Approx(-4.38e-20).epsilon(1e-6));

    b.policy = BudgetPolicy::ConservativeCeiling;
    CHECK(combine_budget(b).uncertainty == doctest::Approx(1e-19));

    // adding the short-link/station allowance reproduces the final number
    b.entries.push_back({"short links and stations", 0.0, 1e-19});
    BudgetTotal t3 = combine_budget(b);
    CHECK(t3.quadrature == doctest::Approx(1.3454e-19).epsilon(1e-4));
    CHECK(t3.uncertainty == doctest::Approx(2e-19));

    UncertaintyBudget single;
    single.entries = {{"only", 1e-20, 3e-20}};
    single.policy = BudgetPolicy::Quadrature;
    CHECK(combine_budget(single).uncertainty == doctest::Approx(3e-20));

    UncertaintyBudget pyth;
    pyth.entries = {{"a", 0.0, 3e-20}, {"b", 0.0, 4e-20}};
    pyth.policy = BudgetPolicy::Quadrature;
    CHECK(combine_budget(pyth).uncertainty == doctest::Approx(5e-20));
    pyth.policy = BudgetPolicy::ConservativeCeiling;
    CHECK(combine_budget(pyth).uncertainty == doctest::Approx(5e-20));  // exact digit stays
}

TEST_CASE("budget properties: monotone, dominated by the largest entry") {
    UncertaintyBudget b;
    b.entries = {{"a", 0.0, 2e-20}, {"b", 0.0, 7e-20}};
    b.policy = BudgetPolicy::Quadrature;
    const double before = combine_budget(b).uncertainty;
    CHECK(before >= 7e-20);
    b.entries.push_back({"c", 0.0, 1e-20});
    CHECK(combine_budget(b).uncertainty >= before);

    UncertaintyBudget empty;
    CHECK_THROWS_AS(combine_budget(empty), std::invalid_argument);
}

TEST_CASE("ceil_one_digit") {
    CHECK(ceil_one_digit(9.0004e-20) == doctest::Approx(1e-19));
    CHECK(ceil_one_digit(1.3454e-19) == doctest::Approx(2e-19));
    CHECK(ceil_one_digit(5e-20) == doctest::Approx(5e-20));
    CHECK(ceil_one_digit(0.0) == 0.0);
    CHECK(ceil_one_digit(2.3e-16) == doctest::Approx(3e-16));
}

TEST_CASE("apply_correction") {
    FreqSeries c = make_series({1e-16, 2e-16, 3e-16});
    FreqSeries zero = make_series({0, 0, 0});
    FreqSeries same = apply_correction(c, zero);
    CHECK(same.y == c.y);

    FreqSeries null = apply_correction(c, c);
    for (double v : null.y) CHECK(v == 0.0);

    FreqSeries gappy = c;
    gappy.valid = {1, 0, 1};
    FreqSeries merged = apply_correction(c, gappy);
    CHECK(merged.valid[1] == 0);

    FreqSeries wrong = make_series({1e-16, 2e-16});
    CHECK_THROWS_AS(apply_correction(c, wrong), std::invalid_argument);
}

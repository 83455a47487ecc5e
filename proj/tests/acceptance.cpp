// Acceptance suite: exercises the toolkit against its quantitative targets
// end to end. Prints one PASS/FAIL line per criterion; exits nonzero when
// any criterion fails.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fiberlink/config.hpp"
#include "fiberlink/link.hpp"
#include "fiberlink/noise.hpp"
#include "fiberlink/postproc.hpp"
#include "fiberlink/scenario.hpp"
#include "fiberlink/series_io.hpp"
#include "fiberlink/stability.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace fiberlink;

namespace {

int g_failures = 0;

void report(int id, const std::string& what, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

void run_criterion(int id, const std::string& what, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        auto [ok, detail] = body();
        report(id, what, ok, detail);
    } catch (const std::exception& e) {
        report(id, what, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string without_timestamp(const std::string& text) {
    std::stringstream in(text), out;
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("generated_at", 0) != 0) out << line << "\n";
    return out.str();
}

}  // namespace

int main() {
    const std::string scen_dir = FIBERLINK_SCENARIO_DIR;
    std::printf("fiberlink acceptance suite\n");

    // 1. uptime arithmetic
    run_criterion(1, "uptime arithmetic: six half-duty elements and the two-branch table", [&] {
        const double six = uptime_product(std::vector<double>(6, 0.5));
        const bool exact = six == 0.015625;
        const bool rounds = std::abs(six * 100.0 - 1.6) < 0.05;  // 1.6% to one decimal

        oracle::Rng rng(27);
        const std::size_t n = 2332800;  // 27 days at 1 s
        const double table[4] = {1.0, 0.985, 0.95, 0.963};
        std::vector<std::pair<std::string, ValidityMask>> masks;
        for (double p : table) {
            ValidityMask m{57849.0, 1.0, std::vector<std::uint8_t>(n, 1)};
            if (p < 1.0)
                for (auto& b : m.bits) b = rng.uniform() < p ? 1 : 0;
            masks.emplace_back(fmt("p%.3f", p), m);
        }
        const double combined = uptime(masks).combined;
        const bool band = std::abs(combined - 0.90) <= 0.005;
        return std::make_pair(exact && rounds && band,
                              fmt("0.5^6 = %.6f; combined = %.4f vs 0.90 +- 0.005", six, combined));
    });

    // 2. cycle-slip hop
    run_criterion(2, "single cycle slip at 1 s gate and 194.4 THz", [&] {
        FreqSeries s = make_series(std::vector<double>(10, 0.0), 1.0, 0.0, 194.4e12);
        FreqSeries hop = inject_cycle_slips(s, {{5, 1}});
        const double dy = hop.y[5];
        const double rel = std::abs(dy - 5e-15) / 5e-15;
        return std::make_pair(rel <= 0.03, fmt("dy = %.4e, %.1f%% from 5e-15", dy, rel * 100));
    });

    // 3. RF reference contribution
    run_criterion(3, "RF reference contribution at the counter limit", [&] {
        const double v = rf_reference_contribution(55e6, 3e-13, 194.4e12);
        const double rel = std::abs(v - 8.3e-20) / 8.3e-20;
        return std::make_pair(rel <= 0.05, fmt("%.4e, %.1f%% from 8.3e-20", v, rel * 100));
    });

    // 4. uncompensated thermal limit
    run_criterion(4, "one-meter thermal limit at half a day and one day", [&] {
        ThermalModel tm;
        tm.length_m = 1.0;
        tm.kappa_per_k = 1.1e-5;
        tm.temp_amplitude_k = 0.25;  // 0.5 K daily variation, peak-to-peak reading
        tm.temp_period_s = 86400.0;
        const double half = uncompensated_thermal_limit(tm, 43200.0);
        const double day = uncompensated_thermal_limit(tm, 86400.0);
        const bool ok_half = std::abs(half - 4.3e-19) <= 0.30 * 4.3e-19;
        const bool ok_day = day >= 0.5e-19 && day <= 2e-19;
        return std::make_pair(ok_half && ok_day,
                              fmt("half-day %.3e (target 4.3e-19 +-30%%), day %.3e (1e-19 x/2)",
                                  half, day));
    });

    // 5. the twelve-day short-link scenario
    run_criterion(5, "short-link scenario: starting stability and daily bump", [&] {
        Scenario sc = load_scenario(config::parse_file(scen_dir + "/short-link-5m.toml"));
        SimResult sim = simulate_end_to_end(sc.topo, sc.specs, sc.n, sc.gate_s, sc.seed,
                                            sc.t0_mjd, sc.nu0_hz);
        StabilityCurve c =
            adev(sim.end_to_end, {1.0, 2000.0, 5000.0, 10000.0, 20000.0, 50000.0});
        const double at1 = c.at_tau(1.0);
        const bool ok1 = std::abs(at1 - 2.3e-16) <= 0.30 * 2.3e-16;
        double bump = 0.0, bump_tau = 0.0;
        for (double tau : {10000.0, 20000.0, 50000.0})
            if (c.at_tau(tau) > bump) { bump = c.at_tau(tau); bump_tau = tau; }
        const bool ok_band = bump >= 4e-18 && bump <= 1.6e-17;
        const bool ok_local = bump > c.at_tau(2000.0);
        return std::make_pair(ok1 && ok_band && ok_local,
                              fmt("adev(1 s) = %.3e (2.3e-16 +-30%%); bump %.3e at %g s in "
                                  "[4e-18, 1.6e-17], above %.3e at 2000 s",
                                  at1, bump, bump_tau, c.at_tau(2000.0)));
    });

    // 6. delay-limited residual floor
    run_criterion(6, "five-meter monitor residual floor at 1 s", [&] {
        NoiseSpec free_run;
        free_run.h_alpha(2) = white_pm_coeff(2.3e-16, 1.0);
        const double delay = fiber_delay_s(5.0);
        StabilityCurve floor = residual_floor(free_run, delay, {1.0});
        const double v = floor.values[0];
        return std::make_pair(v >= 1e-23 && v <= 9e-23,
                              fmt("sigma(1 s) = %.3e in [1e-23, 9e-23], delay %.3e s", v, delay));
    });

    // 7. estimator oracles
    run_criterion(7, "estimator oracles: slopes, closed form, exact scaling", [&] {
        const std::vector<double> taus{1, 2, 5, 10, 20, 50, 100};

        NoiseSpec wfm;
        wfm.h_alpha(0) = white_fm_coeff(1e-15, 1.0);
        wfm.seed = 71;
        StabilityCurve a = adev(gen_power_law(wfm, 1 << 19, 1.0), taus);
        const double s_wfm = oracle::loglog_slope(a.taus_s, a.values);
        const bool ok_wfm = std::abs(s_wfm + 0.5) <= 0.05;

        NoiseSpec wpm;
        wpm.h_alpha(2) = white_pm_coeff(2.3e-16, 1.0);
        wpm.seed = 72;
        StabilityCurve m = mdev(gen_power_law(wpm, 1 << 19, 1.0), taus);
        const double s_wpm = oracle::loglog_slope(m.taus_s, m.values);
        const bool ok_wpm = std::abs(s_wpm + 1.5) <= 0.1;

        const double y0 = 1e-15, fm = 1e-3;
        std::vector<double> y(100000);
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = y0 * std::sin(2.0 * M_PI * fm * static_cast<double>(i) + 0.7);
        StabilityCurve sfm = adev(make_series(y), {100.0, 250.0, 400.0});
        bool ok_sin = true;
        for (std::size_t k = 0; k < sfm.size(); ++k) {
            const double expect = sinusoid_fm_adev(y0, fm, sfm.taus_s[k]);
            ok_sin &= std::abs(sfm.values[k] - expect) <= 0.02 * expect;
        }

        oracle::Rng rng(73);
        FreqSeries base = make_series(std::vector<double>(4000, 0.0));
        for (auto& v : base.y) v = 1e-16 * rng.gauss();
        StabilityCurve b0 = adev(base, taus);
        FreqSeries scaled = base;
        for (auto& v : scaled.y) v *= -8.0;
        StabilityCurve b1 = adev(scaled, taus);
        bool ok_scale = true;
        for (std::size_t k = 0; k < taus.size(); ++k)
            ok_scale &= (b1.values[k] == 8.0 * b0.values[k]);

        return std::make_pair(ok_wfm && ok_wpm && ok_sin && ok_scale,
                              fmt("WFM slope %.3f (-0.5 +-0.05), WPM MDEV slope %.3f (-1.5 "
                                  "+-0.1), sinusoid <=2%%:%s, |c|-scaling exact:%s",
                                  s_wfm, s_wpm, ok_sin ? "yes" : "no", ok_scale ? "yes" : "no"));
    });

    // 8. selection pipeline on the labeled twelve-day fixture
    run_criterion(8, "three-observable selection on the labeled fixture", [&] {
        oracle::Rng rng(2024);
        const std::size_t n = 12 * 86400;
        const double sigma = 4e-17;
        FreqSeries s = make_series(std::vector<double>(n, 0.0), 1.0, 0.0, 194.4e12);
        for (auto& v : s.y) v = sigma * rng.gauss();
        std::vector<std::uint8_t> bad(n, 0);
        const std::size_t seg_start = n / 3, seg_len = 7200;
        for (std::size_t i = seg_start; i < seg_start + seg_len; ++i) {
            s.y[i] = 20.0 * sigma * rng.gauss();
            bad[i] = 1;
        }
        std::size_t placed = 0;
        while (placed < 100) {
            const auto idx =
                static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - 20)) + 10;
            if (bad[idx] || (idx >= seg_start - 10 && idx < seg_start + seg_len + 10)) continue;
            s.y[idx] += (rng.uniform() < 0.5 ? 1.0 : -1.0) * (25.0 + 25.0 * rng.uniform()) * sigma;
            bad[idx] = 1;
            ++placed;
        }

        SelectionConfig cfg;
        SelectionResult r = three_observable_select(s, cfg);
        std::size_t bad_total = 0, bad_rm = 0, clean_total = 0, clean_rm = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (bad[i]) { ++bad_total; bad_rm += !r.final_mask.bits[i]; }
            else { ++clean_total; clean_rm += !r.final_mask.bits[i]; }
        }
        const double frac_bad = static_cast<double>(bad_rm) / static_cast<double>(bad_total);
        const double frac_clean = static_cast<double>(clean_rm) / static_cast<double>(clean_total);

        FreqSeries selected = apply_mask(s, r.final_mask);
        SelectionResult r2 = three_observable_select(selected, cfg);
        std::size_t second = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (selected.valid[i] && !r2.final_mask.bits[i]) ++second;
        const double frac_second =
            static_cast<double>(second) / static_cast<double>(selected.valid_count());

        return std::make_pair(frac_bad >= 0.99 && frac_clean <= 0.01 && frac_second < 0.001,
                              fmt("bad removed %.2f%% (>=99%%), clean removed %.3f%% (<=1%%), "
                                  "second pass %.4f%% (<0.1%%)",
                                  100 * frac_bad, 100 * frac_clean, 100 * frac_second));
    });

    // 9. uncertainty budget combination
    run_criterion(9, "uncertainty budget: quadrature and conservative ceiling", [&] {
        UncertaintyBudget b;
        b.entries = {{"cascaded", -4.8e-20, 9e-20}, {"hybrid", 4.2e-21, 8e-22}};
        b.policy = BudgetPolicy::ConservativeCeiling;
        BudgetTotal two = combine_budget(b);
        const bool ok_quad = std::abs(two.quadrature - 9.0e-20) <= 0.005e-20;
        const bool ok_ceil = two.uncertainty == 1e-19;

        b.entries.push_back({"short links and stations", 0.0, 1e-19});
        BudgetTotal three = combine_budget(b);
        const bool ok_final = three.uncertainty == 2e-19;
        return std::make_pair(ok_quad && ok_ceil && ok_final,
                              fmt("quadrature %.4e -> %.0e; with allowance -> %.0e",
                                  two.quadrature, two.uncertainty, three.uncertainty));
    });

    // 10. byte-level reproducibility through the CLI
    run_criterion(10, "CLI re-runs are byte-identical (manifest timestamp aside)", [&] {
        const std::string bin = FIBERLINK_BIN;
        const fs::path a = fs::temp_directory_path() / "fl_acc_a";
        const fs::path b = fs::temp_directory_path() / "fl_acc_b";
        fs::remove_all(a);
        fs::remove_all(b);
        const std::string cfg = scen_dir + "/hybrid-43km.toml";
        auto simulate = [&](const fs::path& out) {
            const std::string cmd = "FIBERLINK_NO_COLOR=1 \"" + bin + "\" simulate --config \"" +
                                    cfg + "\" --out \"" + out.string() + "\" > /dev/null 2>&1";
            return std::system(cmd.c_str()) == 0;
        };
        if (!simulate(a) || !simulate(b)) return std::make_pair(false, std::string("simulate failed"));
        bool same = slurp(a / "remote.dat") == slurp(b / "remote.dat") &&
                    slurp(a / "end_to_end.dat") == slurp(b / "end_to_end.dat") &&
                    without_timestamp(slurp(a / "manifest.txt")) ==
                        without_timestamp(slurp(b / "manifest.txt"));

        auto analyze = [&](const fs::path& out) {
            const std::string cmd = "FIBERLINK_NO_COLOR=1 \"" + bin + "\" analyze --input \"" +
                                    (a / "end_to_end.dat").string() + "\" --out \"" +
                                    out.string() + "\" --taus auto:2000 > /dev/null 2>&1";
            return std::system(cmd.c_str()) == 0;
        };
        const fs::path ca = fs::temp_directory_path() / "fl_acc_ca";
        const fs::path cb = fs::temp_directory_path() / "fl_acc_cb";
        fs::remove_all(ca);
        fs::remove_all(cb);
        if (!analyze(ca) || !analyze(cb)) return std::make_pair(false, std::string("analyze failed"));
        same = same && slurp(ca / "curve.dat") == slurp(cb / "curve.dat");
        return std::make_pair(same, std::string(same ? "all outputs identical" : "outputs differ"));
    });

    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}

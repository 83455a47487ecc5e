#include "fiberlink/scenario.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "fiberlink/series_io.hpp"
#include "fiberlink/version.hpp"

namespace fiberlink {

namespace fs = std::filesystem;

NoiseSpec load_noise(const config::Table& t, double gate_s) {
    NoiseSpec ns;
    ns.h_alpha(-2) = config::get_number(t, "h_rw_fm", 0.0);
    ns.h_alpha(-1) = config::get_number(t, "h_flicker_fm", 0.0);
    ns.h_alpha(0) = config::get_number(t, "h_white_fm", 0.0);
    ns.h_alpha(1) = config::get_number(t, "h_flicker_pm", 0.0);
    ns.h_alpha(2) = config::get_number(t, "h_white_pm", 0.0);

    // Calibration shorthands: target Allan deviation at one gate time.
    if (const double s1 = config::get_number(t, "white_fm_adev_at_gate", 0.0); s1 > 0.0)
        ns.h_alpha(0) = white_fm_coeff(s1, gate_s);
    if (const double s1 = config::get_number(t, "white_pm_adev_at_gate", 0.0); s1 > 0.0)
        ns.h_alpha(2) = white_pm_coeff(s1, gate_s);

    ns.drift_rate = config::get_number(t, "drift_rate_per_s", 0.0);
    ns.slip_rate = config::get_number(t, "slip_rate_per_s", 0.0);
    ns.gap_rate = config::get_number(t, "gap_rate_per_s", 0.0);
    ns.gap_mean_s = config::get_number(t, "gap_mean_s", 0.0);

    if (const auto* sines = config::get_table_array(t, "sinusoid")) {
        for (const auto& st : *sines) {
            Sinusoid sn;
            sn.amplitude_y = config::require_number(st, "amplitude_y");
            sn.period_s = config::get_number(st, "period_s", constants::seconds_per_day);
            sn.phase_rad = config::get_number(st, "phase_rad", 0.0);
            ns.sinusoids.push_back(sn);
        }
    }
    return ns;
}

ThermalModel load_thermal(const config::Table& t, double nu0_hz, double default_length_m) {
    ThermalModel tm;
    tm.length_m = config::get_number(t, "length_m", default_length_m);
    tm.kappa_per_k = config::get_number(t, "kappa_per_k", constants::default_kappa_per_k);
    tm.temp_period_s = config::get_number(t, "period_s", constants::seconds_per_day);
    tm.temp_phase_rad = config::get_number(t, "phase_rad", 0.0);
    tm.nu0_hz = nu0_hz;

    const std::string wf = config::get_string(t, "waveform", "sinusoid");
    if (wf == "sinusoid") tm.waveform = TempWaveform::Sinusoid;
    else if (wf == "ramp") tm.waveform = TempWaveform::Ramp;
    else throw config::ConfigError("unknown thermal waveform '" + wf + "'");

    if (const auto* amp = config::find_path(t, "amplitude_k")) {
        tm.temp_amplitude_k = amp->as_number();
    } else {
        // A stated "daily variation" needs an interpretation; peak-to-peak
        // is the default reading.
        const double v = config::get_number(t, "daily_variation_k", 0.0);
        const std::string interp = config::get_string(t, "interpretation", "peak-to-peak");
        if (interp == "peak-to-peak") tm.temp_amplitude_k = v / 2.0;
        else if (interp == "peak") tm.temp_amplitude_k = v;
        else if (interp == "rms") tm.temp_amplitude_k = v * std::sqrt(2.0);
        else throw config::ConfigError("unknown temperature interpretation '" + interp + "'");
        if (tm.waveform == TempWaveform::Ramp) tm.temp_amplitude_k = v;  // full swing
    }
    return tm;
}

Scenario load_scenario(const config::Table& t) {
    Scenario sc;
    sc.name = config::get_string(t, "name", "scenario");
    sc.seed = static_cast<std::uint64_t>(config::get_int(t, "seed", 0));
    sc.n = static_cast<std::size_t>(config::get_int(t, "n", 0));
    if (sc.n < 2) throw config::ConfigError("scenario: n must be at least 2");
    sc.gate_s = config::get_number(t, "gate_s", constants::default_gate_s);
    sc.nu0_hz = config::get_number(t, "nu0_hz", constants::default_nu0_hz);
    sc.t0_mjd = config::get_number(t, "t0_mjd", sc.t0_mjd);

    if (const auto* spans = config::get_table_array(t, "span")) {
        for (const auto& st : *spans) {
            Span sp;
            sp.label = config::get_string(st, "label", "");
            sp.length_km = config::require_number(st, "length_km");
            sp.loss_db_per_km = config::get_number(st, "loss_db_per_km", 0.0);
            sp.compensation =
                compensation_from_string(config::get_string(st, "compensation", "none"));
            sc.topo.spans.push_back(sp);
            const auto* nt = config::get_table(st, "noise");
            sc.specs.span_specs.push_back(nt ? load_noise(*nt, sc.gate_s) : NoiseSpec{});
        }
    }
    if (const auto* links = config::get_table_array(t, "short_link")) {
        for (const auto& st : *links) {
            TwoWayMonitor mon;
            mon.label = config::get_string(st, "label", "");
            mon.fiber_length_m = config::get_number(st, "fiber_length_m", 5.0);
            mon.carrier_rf_hz = config::get_number(st, "carrier_rf_hz",
                                                   constants::monitor_carrier_rf_hz);
            mon.divide_by = static_cast<int>(config::get_int(st, "divide_by",
                                                             constants::monitor_divide_by));
            mon.gate_s = sc.gate_s;
            mon.nu0_hz = sc.nu0_hz;
            sc.topo.short_links.push_back(mon);

            ShortLinkNoise sl;
            if (const auto* nt = config::get_table(st, "noise")) sl.noise = load_noise(*nt, sc.gate_s);
            if (const auto* tt = config::get_table(st, "thermal"))
                sl.thermal = load_thermal(*tt, sc.nu0_hz, mon.fiber_length_m);
            sc.specs.short_link_specs.push_back(sl);
        }
    }
    if (const auto* stations = config::get_table_array(t, "station")) {
        for (const auto& st : *stations) {
            RepeaterStation rs;
            rs.label = config::get_string(st, "label", "");
            rs.aom_offset_hz = config::get_number(st, "aom_offset_hz", constants::monitor_aom_hz);
            rs.pll_offset_hz = config::get_number(st, "pll_offset_hz", 0.0);
            rs.interferometer_imbalance_m =
                config::get_number(st, "interferometer_imbalance_m", 0.0);
            sc.topo.stations.push_back(rs);
            // The arm imbalance is exposed to ambient temperature; model it
            // as a thermal section of that length.
            if (const auto* tt = config::get_table(st, "thermal"))
                sc.specs.station_thermals.push_back(
                    load_thermal(*tt, sc.nu0_hz, rs.interferometer_imbalance_m));
            else
                sc.specs.station_thermals.push_back(std::nullopt);
        }
    }
    return sc;
}

UncertaintyBudget load_budget(const config::Table& t) {
    UncertaintyBudget b;
    const std::string pol = config::get_string(t, "policy", "conservative_ceiling");
    if (pol == "conservative_ceiling") b.policy = BudgetPolicy::ConservativeCeiling;
    else if (pol == "quadrature") b.policy = BudgetPolicy::Quadrature;
    else throw config::ConfigError("unknown budget policy '" + pol + "'");
    if (const auto* entries = config::get_table_array(t, "entry")) {
        for (const auto& et : *entries) {
            BudgetEntry e;
            e.label = config::get_string(et, "label", "entry");
            e.bias = config::get_number(et, "bias", 0.0);
            e.uncertainty = config::require_number(et, "uncertainty");
            b.entries.push_back(e);
        }
    }
    if (b.entries.empty()) throw config::ConfigError("budget: no [[entry]] tables");
    return b;
}

FrequencyPlan load_plan(const config::Table& t) {
    FrequencyPlan p;
    p.counter_max_hz = config::get_number(t, "counter_max_hz", constants::counter_max_beat_hz);
    if (const auto* stages = config::get_table_array(t, "stage")) {
        for (const auto& st : *stages) {
            PlanStage ps;
            ps.label = config::get_string(st, "label", "stage");
            ps.offset_hz = config::require_number(st, "offset_hz");
            ps.double_pass = config::get_bool(st, "double_pass", false);
            ps.detected = config::get_bool(st, "detected", false);
            ps.divide_by = static_cast<int>(config::get_int(st, "divide_by", 1));
            p.stages.push_back(ps);
        }
    }
    if (const auto* bands = config::get_table_array(t, "filter_band")) {
        for (const auto& bt : *bands)
            p.filter_bands.emplace_back(config::require_number(bt, "low_hz"),
                                        config::require_number(bt, "high_hz"));
    }
    if (p.stages.empty()) throw config::ConfigError("plan: no [[stage]] tables");
    return p;
}

SelectionConfig load_selection(const config::Table& t) {
    SelectionConfig c;
    c.coarse_bw_hz = config::get_number(t, "coarse_bw_hz", c.coarse_bw_hz);
    c.fine_bw_hz = config::get_number(t, "fine_bw_hz", c.fine_bw_hz);
    c.mean_window_s = config::get_number(t, "mean_window_s", c.mean_window_s);
    c.std_window_s = config::get_number(t, "std_window_s", c.std_window_s);
    c.qf_window_s = config::get_number(t, "qf_window_s", c.qf_window_s);
    c.mean_limit = config::get_number(t, "mean_limit", c.mean_limit);
    c.std_limit = config::get_number(t, "std_limit", c.std_limit);
    c.qf_limit = config::get_number(t, "qf_limit", c.qf_limit);
    c.center_hz = config::get_number(t, "center_hz", c.center_hz);
    c.center_median_window_s =
        config::get_number(t, "center_median_window_s", c.center_median_window_s);
    return c;
}

std::vector<Span> load_spans(const config::Table& t) {
    std::vector<Span> spans;
    if (const auto* arr = config::get_table_array(t, "span")) {
        for (const auto& st : *arr) {
            Span sp;
            sp.label = config::get_string(st, "label", "");
            sp.length_km = config::require_number(st, "length_km");
            sp.loss_db_per_km = config::get_number(st, "loss_db_per_km", 0.0);
            sp.compensation =
                compensation_from_string(config::get_string(st, "compensation", "none"));
            spans.push_back(sp);
        }
    }
    return spans;
}

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s)
        out += std::isalnum(static_cast<unsigned char>(c)) ? c : '-';
    return out.empty() ? "element" : out;
}

}  // namespace

SimulateOutputs run_simulate(const Scenario& sc, const std::string& out_dir,
                             const std::string& config_path) {
    fs::create_directories(out_dir);
    fs::create_directories(fs::path(out_dir) / "masks");
    const std::string hash = file_fingerprint(config_path);

    SimResult sim = simulate_end_to_end(sc.topo, sc.specs, sc.n, sc.gate_s, sc.seed,
                                        sc.t0_mjd, sc.nu0_hz);
    HeaderMeta meta{{"config", fs::path(config_path).filename().string()},
                    {"config_hash", hash},
                    {"scenario", sc.name},
                    {"seed", std::to_string(sc.seed)}};

    SimulateOutputs out;
    auto emit = [&](const std::string& rel, const FreqSeries& s, const std::string& units) {
        HeaderMeta m = meta;
        m["units"] = units;
        write_series((fs::path(out_dir) / rel).string(), s, m);
        out.files.push_back(rel);
    };
    emit("remote.dat", sim.remote, "fractional");
    emit("end_to_end.dat", sim.end_to_end, "fractional");
    if (sim.monitor.size() > 0) {
        meta["divide_by"] = std::to_string(sc.topo.short_links.front().divide_by);
        emit("monitor.dat", sim.monitor, "hz");  // divided counted beat deviations
        meta.erase("divide_by");
    }

    for (const auto& [label, mask] : sim.element_masks) {
        const std::string rel = "masks/" + sanitize(label) + ".mask";
        write_mask((fs::path(out_dir) / rel).string(), mask, {}, meta);
        out.files.push_back(rel);
    }

    // manifest; generated_at is the only non-reproducible line
    const std::string mpath = (fs::path(out_dir) / "manifest.txt").string();
    std::FILE* f = std::fopen(mpath.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + mpath + " for writing");
    std::fprintf(f, "# fiberlink manifest\n");
    std::fprintf(f, "version = %s\n", kVersion);
    std::fprintf(f, "command = simulate\n");
    std::fprintf(f, "scenario = %s\n", sc.name.c_str());
    std::fprintf(f, "config = %s\n", fs::path(config_path).filename().string().c_str());
    std::fprintf(f, "config_hash = %s\n", hash.c_str());
    std::fprintf(f, "seed = %llu\n", static_cast<unsigned long long>(sc.seed));
    std::fprintf(f, "n = %zu\n", sc.n);
    std::fprintf(f, "gate_s = %.17g\n", sc.gate_s);
    std::fprintf(f, "nu0_hz = %.17g\n", sc.nu0_hz);
    for (const auto& rel : out.files) std::fprintf(f, "output = %s\n", rel.c_str());
    const auto now = std::chrono::system_clock::now();
    std::fprintf(f, "generated_at = %lld\n",
                 static_cast<long long>(
                     std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
                         .count()));
    std::fclose(f);
    out.files.push_back("manifest.txt");
    return out;
}

}  // namespace fiberlink

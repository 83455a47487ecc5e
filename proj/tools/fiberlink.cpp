// fiberlink - simulation and post-processing for multi-branch optical-fiber
// frequency-transfer links. See README.md for the file formats.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fiberlink/config.hpp"
#include "fiberlink/link.hpp"
#include "fiberlink/noise.hpp"
#include "fiberlink/postproc.hpp"
#include "fiberlink/scenario.hpp"
#include "fiberlink/series_io.hpp"
#include "fiberlink/stability.hpp"
#include "fiberlink/version.hpp"

namespace fs = std::filesystem;
using namespace fiberlink;

namespace {

bool use_color() {
    if (std::getenv("FIBERLINK_NO_COLOR")) return false;
    return isatty(fileno(stdout));
}
std::string red(const std::string& s) { return use_color() ? "\033[31m" + s + "\033[0m" : s; }
std::string green(const std::string& s) { return use_color() ? "\033[32m" + s + "\033[0m" : s; }

std::vector<double> parse_taus(const std::string& spec, double gate_s, std::size_t n) {
    const double max_tau = static_cast<double>(n) * gate_s / 4.0;
    if (spec.empty() || spec == "auto") return default_taus(gate_s, max_tau);
    if (spec.rfind("auto:", 0) == 0)
        return default_taus(gate_s, std::min(std::stod(spec.substr(5)), max_tau));
    std::vector<double> taus;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) taus.push_back(std::stod(item));
    return taus;
}

HeaderMeta base_meta(const std::string& command, const std::string& input_path) {
    return {{"command", command},
            {"source", fs::path(input_path).filename().string()},
            {"source_hash", file_fingerprint(input_path)}};
}

int cmd_simulate(const std::string& config, const std::string& out,
                 std::optional<std::uint64_t> seed) {
    Scenario sc = load_scenario(config::parse_file(config));
    if (seed) sc.seed = *seed;
    SimulateOutputs files = run_simulate(sc, out, config);
    std::printf("scenario '%s': wrote %zu files to %s\n", sc.name.c_str(), files.files.size(),
                out.c_str());
    return 0;
}

int cmd_analyze(const std::string& input, const std::string& out, const std::string& taus_spec,
                double bin_width, std::optional<double> nu0) {
    FreqSeries s = read_series(input);
    if (nu0) s.nu0_hz = *nu0;
    fs::create_directories(out);
    HeaderMeta meta = base_meta("analyze", input);

    const auto taus = parse_taus(taus_spec, s.gate_s, s.size());
    StabilityCurve a = adev(s, taus);
    StabilityCurve m = mdev(s, taus);
    write_curve((fs::path(out) / "curve.dat").string(), a, m, meta);
    for (const auto& w : a.warnings) std::fprintf(stderr, "adev: %s\n", w.c_str());
    for (const auto& w : m.warnings) std::fprintf(stderr, "mdev: %s\n", w.c_str());

    if (bin_width > 0.0) {
        Histogram h = histogram(s, bin_width);
        write_histogram((fs::path(out) / "histogram.dat").string(), h, meta);
    }

    const SummaryStats st = summary_stats(s);
    std::printf("samples: %zu valid of %zu (uptime %.2f%%)\n", st.count, s.size(),
                100.0 * static_cast<double>(st.count) / static_cast<double>(s.size()));
    std::printf("mean:    %.6e (fractional)  /  %.6e Hz at nu0 = %.6e Hz\n", st.mean,
                st.mean * s.nu0_hz, s.nu0_hz);
    std::printf("median:  %.6e (fractional)  /  %.6e Hz\n", st.median, st.median * s.nu0_hz);
    std::printf("wrote %s\n", (fs::path(out) / "curve.dat").string().c_str());
    return 0;
}

void write_observables(const std::string& path, const SelectionResult& r, const FreqSeries& in,
                       const HeaderMeta& meta) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    std::fprintf(f, "# fiberlink %s\n", kVersion);
    for (const auto& [k, v] : meta) std::fprintf(f, "# %s = %s\n", k.c_str(), v.c_str());
    std::fprintf(f, "# mean_limit = %.17g\n", r.mean_limit_used);
    std::fprintf(f, "# std_limit = %.17g\n", r.std_limit_used);
    std::fprintf(f, "# qf_limit = %.17g\n", r.qf_limit_used);
    std::fprintf(f, "# columns = mjd\trolling_mean\trolling_std\tqf_std\n");
    for (std::size_t i = 0; i < in.size(); ++i) {
        auto val = [](const FreqSeries& s, std::size_t j) {
            return s.valid[j] ? s.y[j] : std::numeric_limits<double>::quiet_NaN();
        };
        std::fprintf(f, "%.12f\t%.10g\t%.10g\t%.10g\n", in.mjd_at(i), val(r.obs_mean, i),
                     val(r.obs_std, i), val(r.obs_qf, i));
    }
    std::fclose(f);
}

int cmd_select(const std::string& input, const std::string& out, const std::string& cfg_path,
               const std::string& mode) {
    FreqSeries s = read_series(input);
    SelectionConfig cfg;
    HeaderMeta meta = base_meta("select", input);
    if (!cfg_path.empty()) {
        cfg = load_selection(config::parse_file(cfg_path));
        meta["config"] = fs::path(cfg_path).filename().string();
        meta["config_hash"] = file_fingerprint(cfg_path);
    }
    fs::create_directories(out);

    if (mode == "simple") {
        auto [filtered, mask] = coarse_filter(s, cfg.fine_bw_hz, cfg.center_hz,
                                              cfg.center_median_window_s);
        std::vector<std::uint8_t> reasons(s.size(), 0);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.valid[i] && !mask.bits[i]) reasons[i] = kReasonCoarse;
        write_mask((fs::path(out) / "mask.dat").string(), to_mask(filtered), reasons, meta);
        write_series((fs::path(out) / "selected.dat").string(), filtered, meta);
        std::printf("simple selection at %.3g Hz: kept %.4f%%\n", cfg.fine_bw_hz,
                    100.0 * uptime_fraction(to_mask(filtered)));
        return 0;
    }

    SelectionResult r = three_observable_select(s, cfg);
    write_mask((fs::path(out) / "mask.dat").string(), r.final_mask, r.reasons, meta);
    write_observables((fs::path(out) / "observables.dat").string(), r, s, meta);
    FreqSeries selected = apply_mask(s, r.final_mask);
    write_series((fs::path(out) / "selected.dat").string(), selected, meta);

    const double kept = uptime_fraction(r.final_mask);
    std::size_t c_coarse = 0, c_mean = 0, c_std = 0, c_qf = 0;
    for (auto rb : r.reasons) {
        c_coarse += (rb & kReasonCoarse) != 0;
        c_mean += (rb & kReasonMean) != 0;
        c_std += (rb & kReasonStd) != 0;
        c_qf += (rb & kReasonQf) != 0;
    }
    std::printf("three-observable selection: kept %.4f%%\n", 100.0 * kept);
    std::printf("removed by: coarse %zu, mean %zu, std %zu, qf %zu (bits may overlap)\n",
                c_coarse, c_mean, c_std, c_qf);
    std::printf("limits: mean %.4g, std %.4g, qf %.4g\n", r.mean_limit_used, r.std_limit_used,
                r.qf_limit_used);
    return 0;
}

int cmd_correct(const std::string& input, const std::string& monitor_path,
                const std::string& out, std::optional<double> nu0, int divide) {
    FreqSeries comparison = read_series(input);
    FreqSeries counted = read_series(monitor_path);
    TwoWayMonitor mon;
    mon.divide_by = divide;
    mon.nu0_hz = nu0 ? *nu0 : comparison.nu0_hz;
    mon.gate_s = counted.gate_s;
    FreqSeries corr = two_way_correction(counted, mon);
    FreqSeries corrected = apply_correction(comparison, corr);
    fs::create_directories(fs::path(out).parent_path().empty() ? "." : fs::path(out).parent_path());
    HeaderMeta meta = base_meta("correct", input);
    meta["monitor"] = fs::path(monitor_path).filename().string();
    meta["sign_convention"] = "corrected = comparison - divide_by*counted/(2 nu0)";
    write_series(out, corrected, meta);
    std::printf("wrote %s (uptime %.2f%%)\n", out.c_str(),
                100.0 * uptime_fraction(to_mask(corrected)));
    return 0;
}

ValidityMask read_any_mask(const std::string& path) {
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    in.close();
    std::ifstream probe(path);
    std::string line;
    bool is_series = false;
    while (std::getline(probe, line) && !line.empty() && line[0] == '#') {
        if (line.find("format = series") != std::string::npos) is_series = true;
    }
    if (is_series) return to_mask(read_series(path));
    return read_mask(path);
}

int cmd_uptime(const std::vector<std::string>& files) {
    std::vector<std::pair<std::string, ValidityMask>> masks;
    for (const auto& f : files) masks.emplace_back(fs::path(f).stem().string(), read_any_mask(f));
    UptimeReport rep = uptime(masks);
    std::fputs(rep.format().c_str(), stdout);
    std::printf("product-law combined (independence): %.4f%%\n",
                100.0 * uptime_product([&] {
                    std::vector<double> fr;
                    for (const auto& [l, u] : rep.per_element) fr.push_back(u);
                    return fr;
                }()));
    return 0;
}

int cmd_budget(const std::string& config) {
    UncertaintyBudget b = load_budget(config::parse_file(config));
    BudgetTotal t = combine_budget(b);
    std::printf("%-28s %14s %14s\n", "entry", "bias", "uncertainty");
    for (const auto& e : b.entries)
        std::printf("%-28s %14.4e %14.4e\n", e.label.c_str(), e.bias, e.uncertainty);
    std::printf("%-28s %14.4e %14.4e (quadrature %.4e)\n", "combined", t.bias, t.uncertainty,
                t.quadrature);
    return 0;
}

int cmd_plan(const std::string& config) {
    const config::Table t = config::parse_file(config);
    FrequencyPlan plan = load_plan(t);
    PlanReport rep = check_plan(plan);
    std::fputs(rep.format().c_str(), stdout);
    const auto spans = load_spans(t);
    if (!spans.empty()) {
        LossBudget lb = loss_budget(spans);
        std::printf("loss budget: %.1f dB total, %.3f dB/km\n", lb.total_db, lb.db_per_km);
    }
    if (!rep.ok()) {
        for (const auto& v : rep.violations)
            std::printf("%s %s\n", red("violation:").c_str(), v.c_str());
        return 2;
    }
    std::printf("%s\n", green("plan ok").c_str());
    return 0;
}

int cmd_ingest(const std::string& input, const std::string& channel, double nominal_hz,
               std::optional<double> nu0, double gate_s, const std::string& out) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open " + input);
    std::vector<std::string> names;  // from "# columns = MJD ch1 ch2 ..."
    std::vector<double> mjds, values;
    std::string line;
    int want = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("columns =");
            if (pos != std::string::npos) {
                std::istringstream ls(line.substr(pos + 9));
                std::string w;
                while (ls >> w) names.push_back(w);
            }
            continue;
        }
        std::istringstream ls(line);
        std::vector<double> cols;
        double v = 0.0;
        while (ls >> v) cols.push_back(v);
        if (cols.size() < 2) throw std::runtime_error(input + ": malformed counter record: " + line);
        if (want < 0) {
            if (!names.empty()) {
                for (std::size_t i = 1; i < names.size(); ++i)
                    if (names[i] == channel) want = static_cast<int>(i);
            }
            if (want < 0 && channel.rfind("ch", 0) == 0) want = std::stoi(channel.substr(2));
            if (want < 1 || want >= static_cast<int>(cols.size()))
                throw std::runtime_error("channel '" + channel + "' not found in " + input);
        }
        mjds.push_back(cols[0]);
        values.push_back(cols[static_cast<std::size_t>(want)]);
    }
    if (values.size() < 2) throw std::runtime_error(input + ": need at least two records");

    FreqSeries s;
    s.t0_mjd = mjds.front();
    s.gate_s = gate_s > 0.0 ? gate_s : (mjds[1] - mjds[0]) * constants::seconds_per_day;
    s.nu0_hz = nu0 ? *nu0 : constants::default_nu0_hz;
    for (double v : values) {
        const double dev_hz = v - nominal_hz;
        s.y.push_back(nu0 ? dev_hz / *nu0 : dev_hz);
    }
    s.valid.assign(s.y.size(), 1);
    HeaderMeta meta = base_meta("ingest", input);
    meta["channel"] = channel;
    meta["nominal_hz"] = std::to_string(nominal_hz);
    meta["units"] = nu0 ? "fractional" : "hz";
    write_series(out, s, meta);
    std::printf("wrote %s (%zu samples, gate %.3g s)\n", out.c_str(), s.size(), s.gate_s);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fiberlink: fiber frequency-transfer link simulation and post-processing"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config, input, out = "out", taus = "auto", mode = "three", channel = "ch1";
    std::string monitor_path, cfg_path;
    std::vector<std::string> mask_files;
    double bin_width = 0.045, nominal = 0.0, gate = 0.0;
    int divide = fiberlink::constants::monitor_divide_by;
    std::optional<std::uint64_t> seed;
    std::optional<double> nu0;

    auto* sim = app.add_subcommand("simulate", "run a scenario file and write datasets");
    sim->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "output directory");
    sim->add_option("--seed", seed, "override the scenario seed");

    auto* ana = app.add_subcommand("analyze", "stability curves, histogram and summary");
    ana->add_option("--input", input, "series file")->required()->check(CLI::ExistingFile);
    ana->add_option("--out", out, "output directory");
    ana->add_option("--taus", taus, "tau grid: auto | auto:MAX | comma list of seconds");
    ana->add_option("--bin-width", bin_width, "histogram bin width in Hz (0 disables)");
    ana->add_option("--nu0", nu0, "override carrier frequency in Hz");

    auto* sel = app.add_subcommand("select", "data-validation pipeline");
    sel->add_option("--input", input, "series file")->required()->check(CLI::ExistingFile);
    sel->add_option("--out", out, "output directory");
    sel->add_option("--config", cfg_path, "selection parameters")->check(CLI::ExistingFile);
    sel->add_option("--mode", mode, "three | simple")->check(CLI::IsMember({"three", "simple"}));

    auto* cor = app.add_subcommand("correct", "subtract the two-way monitor correction");
    cor->add_option("--input", input, "comparison series")->required()->check(CLI::ExistingFile);
    cor->add_option("--monitor", monitor_path, "divided counted monitor record (Hz)")
        ->required()
        ->check(CLI::ExistingFile);
    cor->add_option("--out", out, "output series file");
    cor->add_option("--nu0", nu0, "carrier frequency in Hz");
    cor->add_option("--divide", divide, "tracking divider of the monitor record");

    auto* upt = app.add_subcommand("uptime", "per-element and combined uptime");
    upt->add_option("--masks", mask_files, "mask or series files")
        ->required()
        ->check(CLI::ExistingFile);

    auto* bud = app.add_subcommand("budget", "combine an uncertainty budget");
    bud->add_option("--config", config, "budget file")->required()->check(CLI::ExistingFile);

    auto* pln = app.add_subcommand("plan", "check a frequency plan");
    pln->add_option("--config", config, "plan file")->required()->check(CLI::ExistingFile);

    auto* ing = app.add_subcommand("ingest", "convert a counter export to a series file");
    ing->add_option("--input", input, "counter export (MJD ch1_Hz ch2_Hz ...)")
        ->required()
        ->check(CLI::ExistingFile);
    ing->add_option("--channel", channel, "channel name (chN or header name)");
    ing->add_option("--nominal", nominal, "nominal counted frequency in Hz")->required();
    ing->add_option("--nu0", nu0, "carrier for fractional output (omit to keep Hz)");
    ing->add_option("--gate", gate, "gate time in s (default: inferred)");
    ing->add_option("--out", out, "output series file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config, out, seed);
        if (ana->parsed()) return cmd_analyze(input, out, taus, bin_width, nu0);
        if (sel->parsed()) return cmd_select(input, out, cfg_path, mode);
        if (cor->parsed()) return cmd_correct(input, monitor_path, out, nu0, divide);
        if (upt->parsed()) return cmd_uptime(mask_files);
        if (bud->parsed()) return cmd_budget(config);
        if (pln->parsed()) return cmd_plan(config);
        if (ing->parsed()) return cmd_ingest(input, channel, nominal, nu0, gate, out);
    } catch (const config::ConfigError& e) {
        std::fprintf(stderr, "%s %s\n", red("config error:").c_str(), e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s %s\n", red("error:").c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s %s\n", red("error:").c_str(), e.what());
        return 1;
    }
    return 0;
}

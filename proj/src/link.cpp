#include "fiberlink/link.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fiberlink {

namespace {
constexpr double kPi = std::numbers::pi;

// One-sided PSD of a NoiseSpec.
double spec_psd(const NoiseSpec& spec, double f) {
    double v = 0.0;
    for (int a = -2; a <= 2; ++a) {
        const double ha = spec.h_alpha(a);
        if (ha != 0.0) v += ha * std::pow(f, static_cast<double>(a));
    }
    return v;
}

double delay_suppression(double f, double delay_s) {
    const double w = 2.0 * kPi * f * delay_s;
    return std::min(1.0, w * w / 3.0);
}

// Composite-Simpson integral of g over [0, b] with enough points to resolve
// the sin^4(pi f tau) oscillation.
template <typename G>
double integrate(G&& g, double b, double tau) {
    std::size_t n = static_cast<std::size_t>(std::ceil(std::max(40.0 * b * tau, 2000.0)));
    if (n % 2 == 1) ++n;
    const double h = b / static_cast<double>(n);
    double acc = g(0.0) + g(b);
    for (std::size_t i = 1; i < n; ++i) acc += g(h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

Compensation compensation_from_string(const std::string& s) {
    if (s == "active") return Compensation::Active;
    if (s == "passive") return Compensation::Passive;
    if (s == "hybrid") return Compensation::Hybrid;
    if (s == "none") return Compensation::None;
    throw std::invalid_argument("unknown compensation kind '" + s + "'");
}

std::string to_string(Compensation c) {
    switch (c) {
        case Compensation::Active: return "active";
        case Compensation::Passive: return "passive";
        case Compensation::Hybrid: return "hybrid";
        case Compensation::None: return "none";
    }
    return "?";
}

double fiber_delay_s(double length_m) {
    return constants::fiber_group_index * length_m / constants::c_light_m_s;
}

FreqSeries two_way_correction(const FreqSeries& counted_hz, const TwoWayMonitor& mon) {
    counted_hz.check();
    if (mon.divide_by < 1) throw std::invalid_argument("two_way_correction: divide_by must be >= 1");
    FreqSeries out = counted_hz;
    out.nu0_hz = mon.nu0_hz;
    const double k = static_cast<double>(mon.divide_by) / (2.0 * mon.nu0_hz);
    for (auto& v : out.y) v *= k;
    return out;
}

StabilityCurve residual_floor(const NoiseSpec& free_running, double delay_s,
                              const std::vector<double>& taus_s, double bandwidth_hz) {
    if (delay_s < 0.0) throw std::invalid_argument("residual_floor: delay must be >= 0");
    StabilityCurve c;
    for (double tau : taus_s) {
        if (!(tau > 0.0)) throw std::invalid_argument("residual_floor: tau must be positive");
        auto integrand = [&](double f) {
            if (f <= 0.0) return 0.0;
            const double x = kPi * f * tau;
            const double s = std::sin(x);
            const double kernel = s * s * s * s / (x * x);
            return delay_suppression(f, delay_s) * spec_psd(free_running, f) * kernel;
        };
        const double var = 2.0 * integrate(integrand, bandwidth_hz, tau);
        c.taus_s.push_back(tau);
        c.values.push_back(std::sqrt(std::max(var, 0.0)));
        c.counts.push_back(1);
    }
    return c;
}

StabilityCurve residual_floor(const StabilityCurve& free_running, double delay_s,
                              double bandwidth_hz) {
    if (delay_s < 0.0) throw std::invalid_argument("residual_floor: delay must be >= 0");
    StabilityCurve c = free_running;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double tau = c.taus_s[i];
        auto kernel = [tau](double f) {
            const double x = kPi * f * tau;
            const double s = std::sin(x);
            return f * f * s * s * s * s / (x * x);  // white-PM weighting
        };
        auto suppressed = [&](double f) {
            return f <= 0.0 ? 0.0 : delay_suppression(f, delay_s) * kernel(f);
        };
        auto plain = [&](double f) { return f <= 0.0 ? 0.0 : kernel(f); };
        const double num = integrate(suppressed, bandwidth_hz, tau);
        const double den = integrate(plain, bandwidth_hz, tau);
        c.values[i] *= den > 0.0 ? std::sqrt(num / den) : 0.0;
    }
    return c;
}

namespace {

// Lobe maxima of sin^2(x)/x sit where tan x = 2x, one per interval
// (k pi, k pi + pi/2); they decrease with k.
double lobe_peak_position(int k) {
    double lo = k * kPi + 1e-12, hi = k * kPi + kPi / 2.0 - 1e-12;
    auto f = [](double u) { return std::sin(u) - 2.0 * u * std::cos(u); };
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

double lobes_value(double x) {
    const double s = std::sin(x);
    return s * s / x;
}

}  // namespace

double uncompensated_thermal_limit(const ThermalModel& tm, double tau_s) {
    if (!(tau_s > 0.0)) throw std::invalid_argument("thermal limit: tau must be positive");
    const double y0 = thermal_peak_y(tm);
    if (y0 == 0.0) return 0.0;
    const double x = kPi * tau_s / tm.temp_period_s;

    const double first_peak = lobe_peak_position(0);
    if (x <= first_peak) return y0 * lobes_value(x);

    // Past the first lobe: never credit averaging below the next lobe
    // maximum, since the daily cycle does not cancel itself exactly.
    const int k = static_cast<int>(std::floor(x / kPi));
    double next_peak = lobe_peak_position(k);
    if (next_peak < x) next_peak = lobe_peak_position(k + 1);
    return y0 * std::max(lobes_value(x), lobes_value(next_peak));
}

LossBudget loss_budget(const std::vector<Span>& spans) {
    if (spans.empty()) throw std::invalid_argument("loss_budget: no spans");
    LossBudget b;
    double km = 0.0;
    for (const auto& sp : spans) {
        if (!(sp.length_km > 0.0)) throw std::invalid_argument("loss_budget: span length must be positive");
        if (sp.loss_db_per_km < 0.0) throw std::invalid_argument("loss_budget: loss must be >= 0");
        b.total_db += sp.length_km * sp.loss_db_per_km;
        km += sp.length_km;
    }
    b.db_per_km = b.total_db / km;
    return b;
}

PlanReport check_plan(const FrequencyPlan& plan) {
    PlanReport r;
    double cum = 0.0;
    for (const auto& st : plan.stages) {
        StageReport sr;
        sr.label = st.label;
        sr.detected = st.detected;
        sr.applied_hz = st.offset_hz * (st.double_pass ? 2.0 : 1.0);
        cum += sr.applied_hz;
        sr.cumulative_hz = cum;
        if (st.detected) {
            sr.beat_hz = std::abs(cum);
            const int div = std::max(st.divide_by, 1);
            sr.counted_hz = sr.beat_hz / static_cast<double>(div);
            if (div > 1) r.divided_monitor_hz = sr.counted_hz;
            if (sr.counted_hz > plan.counter_max_hz) {
                sr.over_counter = true;
                std::ostringstream ss;
                ss << st.label << ": counted beat " << sr.counted_hz * 1e-6
                   << " MHz exceeds counter limit " << plan.counter_max_hz * 1e-6 << " MHz";
                r.violations.push_back(ss.str());
            }
            if (!plan.filter_bands.empty()) {
                bool inside = false;
                for (const auto& [lo, hi] : plan.filter_bands)
                    inside |= (sr.beat_hz >= lo && sr.beat_hz <= hi);
                if (!inside) {
                    sr.outside_filters = true;
                    std::ostringstream ss;
                    ss << st.label << ": beat " << sr.beat_hz * 1e-6
                       << " MHz outside all filter bands";
                    r.violations.push_back(ss.str());
                }
            }
        }
        r.stages.push_back(sr);
    }
    return r;
}

std::string PlanReport::format() const {
    std::ostringstream ss;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-24s %13s %13s %13s %13s %s\n", "stage", "applied/MHz",
                  "cumul/MHz", "beat/MHz", "counted/MHz", "flags");
    ss << buf;
    for (const auto& st : stages) {
        std::string flags;
        if (!st.detected) flags = " (shift only)";
        if (st.over_counter) flags += " OVER-COUNTER";
        if (st.outside_filters) flags += " OUTSIDE-FILTERS";
        if (flags.empty()) flags = " ok";
        std::snprintf(buf, sizeof buf, "%-24s %13.6f %13.6f %13.6f %13.6f%s\n", st.label.c_str(),
                      st.applied_hz * 1e-6, st.cumulative_hz * 1e-6, st.beat_hz * 1e-6,
                      st.counted_hz * 1e-6, flags.c_str());
        ss << buf;
    }
    if (divided_monitor_hz > 0.0) {
        std::snprintf(buf, sizeof buf, "divided monitor frequency: %.6f MHz\n",
                      divided_monitor_hz * 1e-6);
        ss << buf;
    }
    return ss.str();
}

double rf_reference_contribution(double beat_hz, double sigma_rf, double nu0_hz) {
    if (!(beat_hz > 0.0) || sigma_rf < 0.0 || !(nu0_hz > 0.0))
        throw std::invalid_argument("rf_reference_contribution: bad arguments");
    return beat_hz * sigma_rf / nu0_hz;
}

double desync_error(double drift_hz_per_s, double dt_s, double nu0_hz) {
    if (dt_s < 0.0 || !(nu0_hz > 0.0)) throw std::invalid_argument("desync_error: bad arguments");
    return std::abs(drift_hz_per_s) * dt_s / nu0_hz;
}

SimResult simulate_end_to_end(const LinkTopology& topo, const SimSpecs& specs,
                              std::size_t n, double gate_s, std::uint64_t seed,
                              double t0_mjd, double nu0_hz) {
    if (topo.spans.size() != specs.span_specs.size() ||
        topo.short_links.size() != specs.short_link_specs.size() ||
        topo.stations.size() != specs.station_thermals.size())
        throw std::invalid_argument("simulate_end_to_end: topology and specs sizes differ");
    if (n < 2) throw std::invalid_argument("simulate_end_to_end: need at least two samples");

    auto blank = [&] {
        FreqSeries s;
        s.t0_mjd = t0_mjd;
        s.gate_s = gate_s;
        s.nu0_hz = nu0_hz;
        s.y.assign(n, 0.0);
        s.valid.assign(n, 1);
        return s;
    };

    SimResult res;
    res.remote = blank();
    res.monitor = FreqSeries{};
    std::uint64_t stream = 0;
    ValidityMask combined = to_mask(res.remote);
    std::vector<double> slip_delta(n, 0.0);  // counting artifacts, measured record only

    auto add_element = [&](const FreqSeries& noise, const NoiseSpec& ns,
                           const std::string& label) {
        for (std::size_t i = 0; i < n; ++i) res.remote.y[i] += noise.y[i];
        const double hop = 1.0 / (gate_s * nu0_hz);
        for (const auto& [idx, sign] : detail::draw_slips(ns, n, gate_s))
            slip_delta[idx] += static_cast<double>(sign) * hop;
        ValidityMask m = to_mask(noise);
        res.element_masks.emplace_back(label, m);
        combined = mask_and(combined, m);
    };

    for (std::size_t k = 0; k < topo.spans.size(); ++k) {
        const Span& sp = topo.spans[k];
        NoiseSpec ns = specs.span_specs[k];
        ns.seed = detail::mix_seed(seed, ++stream);
        FreqSeries contrib;
        if (sp.compensation == Compensation::None) {
            NoiseSpec clean = ns;
            clean.slip_rate = 0.0;
            contrib = gen_power_law(clean, n, gate_s, t0_mjd, nu0_hz);
        } else {
            // Delay-limited residual of the compensated span: free-running
            // PSD times min(1, (2 pi f tau_d)^2 / 3).
            const double delay = fiber_delay_s(sp.length_km * 1000.0);
            auto psd = [&ns, delay](double f) {
                return delay_suppression(f, delay) * spec_psd(ns, f);
            };
            contrib = blank();
            bool any_h = false;
            for (double v : ns.h) any_h |= (v != 0.0);
            if (any_h)
                contrib.y = detail::synthesize_psd(psd, n, gate_s, detail::mix_seed(ns.seed, 0));
            contrib = inject_gaps(contrib, detail::draw_gaps(ns, n, gate_s));
        }
        add_element(contrib, ns, sp.label.empty() ? "span-" + std::to_string(k) : sp.label);
    }

    for (std::size_t k = 0; k < topo.short_links.size(); ++k) {
        const TwoWayMonitor& mon = topo.short_links[k];
        const ShortLinkNoise& sl = specs.short_link_specs[k];
        NoiseSpec ns = sl.noise;
        ns.seed = detail::mix_seed(seed, ++stream);
        NoiseSpec clean = ns;
        clean.slip_rate = 0.0;
        FreqSeries contrib = gen_power_law(clean, n, gate_s, t0_mjd, nu0_hz);
        if (sl.thermal) {
            FreqSeries th = thermal_phase_series(*sl.thermal, n, gate_s, t0_mjd);
            for (std::size_t i = 0; i < n; ++i) contrib.y[i] += th.y[i];
        }
        if (k == 0) {
            // Divided round-trip record as counted behind the tracking
            // oscillator; shares the short link's validity (unlocks).
            res.monitor = contrib;
            const double kdiv = 2.0 * nu0_hz / static_cast<double>(mon.divide_by);
            for (std::size_t i = 0; i < n; ++i) res.monitor.y[i] = contrib.y[i] * kdiv;
        }
        add_element(contrib, ns, mon.label.empty() ? "short-link-" + std::to_string(k) : mon.label);
    }

    for (std::size_t k = 0; k < topo.stations.size(); ++k) {
        ++stream;
        if (!specs.station_thermals[k]) continue;
        FreqSeries th = thermal_phase_series(*specs.station_thermals[k], n, gate_s, t0_mjd);
        th.nu0_hz = nu0_hz;
        add_element(th, NoiseSpec{}, topo.stations[k].label.empty()
                                         ? "station-" + std::to_string(k)
                                         : topo.stations[k].label);
    }

    res.end_to_end = res.remote;  // truth plus counting artifacts below
    for (std::size_t i = 0; i < n; ++i) res.end_to_end.y[i] += slip_delta[i];
    res.end_to_end.valid = combined.bits;
    return res;
}

}  // namespace fiberlink

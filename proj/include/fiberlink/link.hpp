#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fiberlink/noise.hpp"
#include "fiberlink/series.hpp"
#include "fiberlink/stability.hpp"

namespace fiberlink {

enum class Compensation { Active, Passive, Hybrid, None };

Compensation compensation_from_string(const std::string& s);
std::string to_string(Compensation c);

struct Span {
    std::string label;
    double length_km = 0.0;
    double loss_db_per_km = 0.0;
    Compensation compensation = Compensation::None;
};

struct RepeaterStation {
    std::string label;
    double aom_offset_hz = constants::monitor_aom_hz;
    double pll_offset_hz = 0.0;
    double interferometer_imbalance_m = 0.0;
};

/// Short interconnect watched by the one-AOM/Faraday-mirror round-trip
/// monitor: the detected beat at carrier_rf is tracked, divided and counted.
struct TwoWayMonitor {
    std::string label;
    double fiber_length_m = 5.0;
    double carrier_rf_hz = constants::monitor_carrier_rf_hz;
    int divide_by = constants::monitor_divide_by;
    double gate_s = constants::default_gate_s;
    double nu0_hz = constants::default_nu0_hz;
};

struct LinkTopology {
    std::vector<Span> spans;
    std::vector<RepeaterStation> stations;
    std::vector<TwoWayMonitor> short_links;
};

/// One-way propagation delay of a fiber of the given length.
double fiber_delay_s(double length_m);

/// Converts the divided, tracked round-trip beat record (values in Hz,
/// deviations from the nominal counted frequency) into the one-way
/// fractional-frequency correction
///   y_corr = divide_by * counted / (2 nu0),
/// to be subtracted from the comparison data (reciprocity assumed).
FreqSeries two_way_correction(const FreqSeries& counted_hz, const TwoWayMonitor& mon);

/// Delay-limited post-correction floor: the free-running PSD is suppressed
/// by min(1, (2 pi f tau_d)^2 / 3) and converted back to an Allan deviation
/// by the transfer integral over [0, bandwidth]. The default bandwidth is
/// the effective band of the counted beat record.
constexpr double kDefaultResidualBandwidthHz = 2.0;
StabilityCurve residual_floor(const NoiseSpec& free_running, double delay_s,
                              const std::vector<double>& taus_s,
                              double bandwidth_hz = kDefaultResidualBandwidthHz);

/// Same suppression applied to a measured curve, assuming a white-phase-like
/// spectrum behind it; each value is scaled by the suppression ratio.
StabilityCurve residual_floor(const StabilityCurve& free_running, double delay_s,
                              double bandwidth_hz = kDefaultResidualBandwidthHz);

/// Instability bound implied by an uncompensated thermal section at
/// averaging time tau: the sinusoidal-FM Allan deviation of the model's peak
/// amplitude, kept from averaging below the recurrence level of later lobes
/// (the daily cycle does not repeat exactly day to day, so the exact nulls
/// of the periodic closed form are not credited).
double uncompensated_thermal_limit(const ThermalModel& tm, double tau_s);

struct LossBudget {
    double total_db = 0.0;
    double db_per_km = 0.0;
};
LossBudget loss_budget(const std::vector<Span>& spans);

struct PlanStage {
    std::string label;
    double offset_hz = 0.0;     // signed RF offset added by this stage
    bool double_pass = false;   // e.g. an AOM traversed out and back
    bool detected = false;      // a photodiode/counter sits here
    int divide_by = 1;          // tracking divider ahead of the counter
};

struct FrequencyPlan {
    std::vector<PlanStage> stages;
    double counter_max_hz = constants::counter_max_beat_hz;
    std::vector<std::pair<double, double>> filter_bands;  // acceptable raw-beat windows
};

struct StageReport {
    std::string label;
    double applied_hz = 0.0;     // offset including the double-pass factor
    double cumulative_hz = 0.0;
    double beat_hz = 0.0;        // |cumulative| where detected
    double counted_hz = 0.0;     // beat after the tracking divider
    bool detected = false;
    bool over_counter = false;
    bool outside_filters = false;
};

struct PlanReport {
    std::vector<StageReport> stages;
    double divided_monitor_hz = 0.0;  // counted value of the last divided detection
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string format() const;  // aligned text table
};

/// Walks the plan accumulating offsets. At each detection point the raw beat
/// must sit inside a filter band (when bands are given) and the counted
/// (divided) beat must stay within the counter range. Violations are
/// reported, never thrown.
PlanReport check_plan(const FrequencyPlan& plan);

/// Uncertainty floor from counting a beat against an RF reference of given
/// fractional instability: beat * sigma_rf / nu0.
double rf_reference_contribution(double beat_hz, double sigma_rf, double nu0_hz);

/// Inaccuracy from de-synchronised measurements under laser drift:
/// drift * dt / nu0.
double desync_error(double drift_hz_per_s, double dt_s, double nu0_hz);

/// Noise models attached to the topology for simulation.
struct ShortLinkNoise {
    NoiseSpec noise;
    std::optional<ThermalModel> thermal;
};
struct SimSpecs {
    std::vector<NoiseSpec> span_specs;              // free-running, one per span
    std::vector<ShortLinkNoise> short_link_specs;   // one per short link
    std::vector<std::optional<ThermalModel>> station_thermals;  // one per station
};

struct SimResult {
    FreqSeries remote;      // transferred-signal truth, gap-free
    FreqSeries end_to_end;  // measured comparison record (validity = all elements)
    FreqSeries monitor;     // divided round-trip record of the first short link, Hz
    std::vector<std::pair<std::string, ValidityMask>> element_masks;
};

/// Composes the end-to-end record: compensated spans contribute noise shaped
/// by their delay-limited residual PSD, uncompensated spans and short links
/// contribute their full noise, stations contribute the thermal model of
/// their interferometer imbalance. Element sub-seeds derive deterministically
/// from the run seed.
SimResult simulate_end_to_end(const LinkTopology& topo, const SimSpecs& specs,
                              std::size_t n, double gate_s, std::uint64_t seed,
                              double t0_mjd = 0.0,
                              double nu0_hz = constants::default_nu0_hz);

}  // namespace fiberlink

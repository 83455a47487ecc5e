#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "fiberlink/series.hpp"

namespace fiberlink {

struct Sinusoid {
    double amplitude_y = 0.0;  // peak fractional-frequency amplitude
    double period_s = constants::seconds_per_day;
    double phase_rad = 0.0;
};

/// Recipe for one noise realization. The one-sided fractional-frequency PSD
/// is S_y(f) = sum over alpha in [-2, 2] of h[alpha + 2] * f^alpha. Slips and
/// gaps are drawn from independent per-purpose substreams of the seed, so
/// adding a sinusoid never moves a slip.
struct NoiseSpec {
    std::array<double, 5> h{};         // h[alpha + 2], alpha = -2 .. 2
    double drift_rate = 0.0;           // fractional frequency per second
    std::vector<Sinusoid> sinusoids;
    double slip_rate = 0.0;            // expected cycle slips per second
    double gap_rate = 0.0;             // gap starts per second
    double gap_mean_s = 0.0;           // mean gap duration
    std::uint64_t seed = 0;

    double& h_alpha(int alpha) { return h[static_cast<std::size_t>(alpha + 2)]; }
    double h_alpha(int alpha) const { return h[static_cast<std::size_t>(alpha + 2)]; }
    bool all_zero() const;
};

enum class TempWaveform { Sinusoid, Ramp };

/// Temperature-driven path-length model of a fiber section. The optical
/// phase in cycles is phi(t) = (nu0 / c) * length * kappa * dT(t) and the
/// fractional frequency is its time derivative over nu0. For the sinusoid
/// waveform temp_amplitude_k is the peak (half the swing); for the ramp it
/// is the full swing per period (a sawtooth, giving constant |y|).
struct ThermalModel {
    double length_m = 0.0;
    double kappa_per_k = constants::default_kappa_per_k;
    double temp_amplitude_k = 0.0;
    double temp_period_s = constants::seconds_per_day;
    double temp_phase_rad = 0.0;
    double nu0_hz = constants::default_nu0_hz;
    TempWaveform waveform = TempWaveform::Sinusoid;
};

/// Peak fractional-frequency amplitude of the thermal model.
double thermal_peak_y(const ThermalModel& tm);

/// Seeded synthesis of the full NoiseSpec: spectrally shaped power-law noise
/// plus drift and sinusoids, then random slips and gaps at the configured
/// rates. Identical spec and seed give a bit-identical series.
FreqSeries gen_power_law(const NoiseSpec& spec, std::size_t n, double gate_s,
                         double t0_mjd = 0.0,
                         double nu0_hz = constants::default_nu0_hz);

/// Deterministic series of the thermal model evaluated analytically.
FreqSeries thermal_phase_series(const ThermalModel& tm, std::size_t n, double gate_s,
                                double t0_mjd = 0.0);

/// Adds sign * (one cycle)/(gate * nu0) to y at each index. Out-of-range
/// indices throw.
FreqSeries inject_cycle_slips(const FreqSeries& s,
                              const std::vector<std::pair<std::size_t, int>>& slips);

/// Marks [start, start+length) invalid for each gap; overlaps take union
/// semantics. Out-of-range gaps throw.
FreqSeries inject_gaps(const FreqSeries& s,
                       const std::vector<std::pair<std::size_t, std::size_t>>& gaps);

/// Pointwise sum on identical timebases; validity is the AND of the parts.
FreqSeries compose(const std::vector<FreqSeries>& parts);

/// h0 giving white FM with sigma_y(tau) = sqrt(h0 / (2 tau)) equal to
/// sigma_at_gate at tau = gate.
double white_fm_coeff(double sigma_at_gate, double gate_s);

/// h2 giving white PM whose sampled first-difference Allan deviation at
/// tau = gate equals sigma_at_gate:  h2 = sigma^2 gate^3 / (1/24 + 1/(4 pi^2)).
double white_pm_coeff(double sigma_at_gate, double gate_s);

namespace detail {

/// Spectral-shaping synthesis from an arbitrary one-sided PSD S_y(f).
/// Used by gen_power_law and by the delay-limited span residual generator.
std::vector<double> synthesize_psd(const std::function<double(double)>& psd_one_sided,
                                   std::size_t n, double gate_s, std::uint64_t seed);

/// Deterministic stream splitting (splitmix64 chain).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// The slip positions/signs gen_power_law would inject for this spec.
std::vector<std::pair<std::size_t, int>> draw_slips(const NoiseSpec& spec, std::size_t n,
                                                    double gate_s);

/// The gap ranges gen_power_law would mark for this spec.
std::vector<std::pair<std::size_t, std::size_t>> draw_gaps(const NoiseSpec& spec, std::size_t n,
                                                           double gate_s);

}  // namespace detail

}  // namespace fiberlink

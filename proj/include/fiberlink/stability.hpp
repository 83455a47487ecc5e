#pragma once

#include <map>
#include <string>
#include <vector>

#include "fiberlink/series.hpp"

namespace fiberlink {

/// Frequency-stability curve: deviation values on a tau grid, with the number
/// of estimator terms that survived gap skipping at each tau.
struct StabilityCurve {
    std::vector<double> taus_s;
    std::vector<double> values;
    std::vector<std::size_t> counts;
    std::vector<std::string> warnings;  // taus omitted and why

    std::size_t size() const { return taus_s.size(); }
    /// Value at tau, or -1 when the tau was omitted.
    double at_tau(double tau_s) const;
};

/// Overlapping Allan deviation from fractional-frequency data. Counter data
/// are taken as produced (triangular Lambda averages from a dead-time-free
/// counter); no Pi-mode conversion is applied. Any estimator term touching
/// an invalid sample is skipped. Taus that are not an integer multiple of
/// the gate throw; taus with no surviving terms are omitted with a warning.
StabilityCurve adev(const FreqSeries& s, const std::vector<double>& taus_s);

/// Overlapping modified Allan deviation, same conventions as adev.
StabilityCurve mdev(const FreqSeries& s, const std::vector<double>& taus_s);

/// Closed-form Allan deviation of pure sinusoidal frequency modulation with
/// peak amplitude y0 and modulation frequency f_m:
///   sigma_y(tau) = y0 * sin^2(pi f_m tau) / (pi f_m tau).
double sinusoid_fm_adev(double y0, double f_m_hz, double tau_s);

/// 1-2-5-per-decade grid of taus from the gate up to max_tau_s inclusive.
std::vector<double> default_taus(double gate_s, double max_tau_s);

/// Text output, `tau_s<TAB>adev<TAB>mdev<TAB>n_terms` (gnuplot-friendly).
/// Rows keep only taus present in both curves; n_terms is the ADEV count.
void write_curve(const std::string& path, const StabilityCurve& a,
                 const StabilityCurve& m,
                 const std::map<std::string, std::string>& meta = {});

/// Histogram as `bin_left<TAB>bin_right<TAB>count` rows.
void write_histogram(const std::string& path, const Histogram& h,
                     const std::map<std::string, std::string>& meta = {});

}  // namespace fiberlink

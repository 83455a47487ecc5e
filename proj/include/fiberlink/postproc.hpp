#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fiberlink/series.hpp"

namespace fiberlink {

/// Parameters of the data-validation pipeline. Thresholds left at zero are
/// derived from robust statistics of the observables themselves: mean_limit
/// as 5 * (1.4826 * MAD) of the rolling mean around its median, std_limit as
/// 2 * median of the rolling standard deviation. qf_limit is an absolute
/// fraction-scale threshold on the rolling std of the 0/1 quality factor.
struct SelectionConfig {
    double coarse_bw_hz = 10.0;
    double fine_bw_hz = 1.0;
    double mean_window_s = 9.0;
    double std_window_s = 2750.0;
    double qf_window_s = 2750.0;
    double mean_limit = 0.0;   // 0 = auto (robust)
    double std_limit = 0.0;    // 0 = auto (robust)
    double qf_limit = 0.1;
    double center_hz = 0.0;                 // coarse-filter center (deviations file)
    double center_median_window_s = 0.0;    // > 0: rolling-median center instead
};

enum ReasonBit : std::uint8_t {
    kReasonCoarse = 1,
    kReasonMean = 2,
    kReasonStd = 4,
    kReasonQf = 8,
};

struct SelectionResult {
    ValidityMask final_mask;                 // input validity AND all steps
    std::vector<std::uint8_t> reasons;       // per-sample ReasonBit OR
    ValidityMask mask_coarse, mask_mean, mask_std, mask_qf;  // per-step keep masks
    FreqSeries obs_mean, obs_std, obs_qf;    // the three plotted observables
    double mean_limit_used = 0.0, std_limit_used = 0.0, qf_limit_used = 0.0;
};

/// Marks samples whose |y * nu0 - center| exceeds the bandwidth as invalid;
/// the returned mask is the boolean quality factor (true = kept). With
/// center_median_window_s > 0 the center follows a rolling median.
std::pair<FreqSeries, ValidityMask> coarse_filter(const FreqSeries& s, double bw_hz,
                                                  double center_hz = 0.0,
                                                  double center_median_window_s = 0.0);

/// The three-observable selection: coarse quality factor, rolling mean
/// (outliers), rolling std (anomalous noise), rolling std of the quality
/// factor (unstable segments). Samples whose observable is undefined (edges,
/// sparse windows) are not flagged by that step.
SelectionResult three_observable_select(const FreqSeries& s, const SelectionConfig& cfg);

struct UptimeReport {
    std::vector<std::pair<std::string, double>> per_element;
    double combined = 0.0;
    std::string format() const;
};

/// Per-element uptime on the common interval and the fraction where every
/// mask is true.
UptimeReport uptime(const std::vector<std::pair<std::string, ValidityMask>>& masks);

/// Product of element availabilities (independence assumption).
double uptime_product(const std::vector<double>& fractions);

enum class BudgetPolicy { Quadrature, ConservativeCeiling };

struct BudgetEntry {
    std::string label;
    double bias = 0.0;
    double uncertainty = 0.0;
};

struct UncertaintyBudget {
    std::vector<BudgetEntry> entries;
    BudgetPolicy policy = BudgetPolicy::ConservativeCeiling;
};

struct BudgetTotal {
    double bias = 0.0;
    double uncertainty = 0.0;   // per policy
    double quadrature = 0.0;    // always reported
};

/// Sum of biases; quadrature of uncertainties; the conservative policy
/// rounds the quadrature up to one significant digit (never below it).
BudgetTotal combine_budget(const UncertaintyBudget& b);

/// Round up to one significant digit.
double ceil_one_digit(double v);

/// comparison - correction, pointwise on identical timebases, validity AND.
FreqSeries apply_correction(const FreqSeries& comparison, const FreqSeries& correction);

}  // namespace fiberlink

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fiberlink/constants.hpp"

namespace fiberlink {

/// Uniformly sampled fractional-frequency record.
///
/// Sample i is timestamped t0_mjd + i * gate_s / 86400. Invalid samples keep
/// whatever value they carry but are excluded from every statistic; they are
/// never zero-filled.
struct FreqSeries {
    double t0_mjd = 0.0;
    double gate_s = constants::default_gate_s;
    double nu0_hz = constants::default_nu0_hz;
    std::vector<double> y;
    std::vector<std::uint8_t> valid;

    std::size_t size() const { return y.size(); }
    double mjd_at(std::size_t i) const {
        return t0_mjd + static_cast<double>(i) * gate_s / constants::seconds_per_day;
    }
    std::size_t valid_count() const;

    /// Throws std::invalid_argument if an invariant is broken.
    void check() const;
};

/// Boolean per-sample quality record on the same timebase convention as
/// FreqSeries. AND-combination never increases uptime.
struct ValidityMask {
    double t0_mjd = 0.0;
    double gate_s = constants::default_gate_s;
    std::vector<std::uint8_t> bits;

    std::size_t size() const { return bits.size(); }
    double mjd_at(std::size_t i) const {
        return t0_mjd + static_cast<double>(i) * gate_s / constants::seconds_per_day;
    }
};

/// Uniform-bin histogram of frequency deviations in Hz.
struct Histogram {
    double bin_width_hz = 0.0;
    std::vector<double> edges;        // size counts.size() + 1, uniform spacing
    std::vector<std::uint64_t> counts;
};

struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    std::size_t count = 0;
};

/// Construct an all-valid series with the given samples.
FreqSeries make_series(std::vector<double> y, double gate_s = 1.0,
                       double t0_mjd = 0.0,
                       double nu0_hz = constants::default_nu0_hz);

/// Centered moving average over valid samples. The window holds
/// round(window_s / gate) samples (at least one). An output sample is
/// invalid when the window sticks out of the record or when fewer than half
/// of the window's samples are valid.
FreqSeries rolling_mean(const FreqSeries& s, double window_s);

/// Centered moving sample standard deviation (N-1 denominator), same window
/// and validity rules as rolling_mean; additionally needs two valid samples.
FreqSeries rolling_std(const FreqSeries& s, double window_s);

/// Centered moving median over valid samples, same validity rules as
/// rolling_mean. Used as an alternative center estimate for coarse filtering.
FreqSeries rolling_median(const FreqSeries& s, double window_s);

/// Mean, median and count over valid samples. Median of an even count is the
/// midpoint of the two central order statistics. Throws when no sample is
/// valid.
SummaryStats summary_stats(const FreqSeries& s);

/// Histogram of df = y * nu0 over valid samples. Edges are aligned to
/// integer multiples of bin_width_hz and cover [min, max]; the sum of counts
/// equals the number of valid samples.
Histogram histogram(const FreqSeries& s, double bin_width_hz);

/// Validity mask of a series.
ValidityMask to_mask(const FreqSeries& s);

/// Pointwise AND on the overlapping part of the two timebases. Gates must
/// match and the sample grids must line up.
ValidityMask mask_and(const ValidityMask& a, const ValidityMask& b);

/// Fraction of true bits. Throws on an empty mask.
double uptime_fraction(const ValidityMask& m);

/// Copy of s with validity replaced by (s.valid AND m) on the common grid;
/// mask must cover the series timebase with matching gate.
FreqSeries apply_mask(const FreqSeries& s, const ValidityMask& m);

namespace detail {
/// Offset in samples of b's origin relative to a's. Throws when the gates
/// differ or the grids are misaligned.
std::int64_t grid_offset(double a_t0, double b_t0, double gate_a, double gate_b);
}  // namespace detail

}  // namespace fiberlink

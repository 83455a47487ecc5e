#include "fiberlink/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace fiberlink {

namespace {

// Median of the valid samples of a series (helper for robust limits).
double median_of_valid(const FreqSeries& s) {
    std::vector<double> v;
    v.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.valid[i]) v.push_back(s.y[i]);
    if (v.empty()) throw std::invalid_argument("selection: observable has no valid samples");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    if (v.size() % 2 == 1) return v[mid];
    const double hi = v[mid];
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
}

double mad_scale(const FreqSeries& s, double center) {
    std::vector<double> v;
    v.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.valid[i]) v.push_back(std::abs(s.y[i] - center));
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double mad = v[mid];
    if (v.size() % 2 == 0) {
        const double lo = *std::max_element(v.begin(), v.begin() + mid);
        mad = 0.5 * (lo + mad);
    }
    return 1.4826 * mad;  // Gaussian-consistent scale
}

}  // namespace

std::pair<FreqSeries, ValidityMask> coarse_filter(const FreqSeries& s, double bw_hz,
                                                  double center_hz,
                                                  double center_median_window_s) {
    s.check();
    if (!(bw_hz > 0.0)) throw std::invalid_argument("coarse_filter: bandwidth must be positive");

    FreqSeries centers;
    const bool rolling_center = center_median_window_s > 0.0;
    if (rolling_center) centers = rolling_median(s, center_median_window_s);

    FreqSeries out = s;
    ValidityMask q = to_mask(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.valid[i]) { q.bits[i] = 0; continue; }
        double center = center_hz;
        if (rolling_center && centers.valid[i]) center = centers.y[i] * s.nu0_hz;
        const bool keep = std::abs(s.y[i] * s.nu0_hz - center) <= bw_hz;
        q.bits[i] = keep ? 1 : 0;
        if (!keep) out.valid[i] = 0;
    }
    return {out, q};
}

SelectionResult three_observable_select(const FreqSeries& s, const SelectionConfig& cfg) {
    s.check();
    const std::size_t n = s.size();
    const double max_window = std::max({cfg.mean_window_s, cfg.std_window_s, cfg.qf_window_s});
    if (static_cast<double>(n) * s.gate_s <= max_window)
        throw std::invalid_argument("selection: series shorter than the largest window");
    if (s.valid_count() == 0) throw std::invalid_argument("selection: all samples invalid");

    SelectionResult r;
    r.reasons.assign(n, 0);

    // (1) coarse bandwidth filter -> boolean quality factor
    auto [coarse, q] = coarse_filter(s, cfg.coarse_bw_hz, cfg.center_hz,
                                     cfg.center_median_window_s);
    r.mask_coarse = q;
    for (std::size_t i = 0; i < n; ++i)
        if (s.valid[i] && !q.bits[i]) r.reasons[i] |= kReasonCoarse;

    // (2) rolling mean of y: outliers
    r.obs_mean = rolling_mean(coarse, cfg.mean_window_s);
    double mean_limit = cfg.mean_limit;
    double mean_center = 0.0;
    if (mean_limit <= 0.0) {
        mean_center = median_of_valid(r.obs_mean);
        mean_limit = 5.0 * mad_scale(r.obs_mean, mean_center);
    }
    r.mean_limit_used = mean_limit;
    r.mask_mean = to_mask(s);
    for (std::size_t i = 0; i < n; ++i) {
        const bool bad = r.obs_mean.valid[i] && std::abs(r.obs_mean.y[i] - mean_center) > mean_limit;
        r.mask_mean.bits[i] = bad ? 0 : (s.valid[i] ? 1 : 0);
        if (s.valid[i] && bad) r.reasons[i] |= kReasonMean;
    }

    // (3) rolling std of y: anomalous noise. All three observables are
    // computed over the same coarse-filtered record; at the default window
    // widths an isolated outlier cannot lift this one over its limit.
    r.obs_std = rolling_std(coarse, cfg.std_window_s);
    double std_limit = cfg.std_limit;
    if (std_limit <= 0.0) std_limit = 2.0 * median_of_valid(r.obs_std);
    r.std_limit_used = std_limit;
    r.mask_std = to_mask(s);
    for (std::size_t i = 0; i < n; ++i) {
        const bool bad = r.obs_std.valid[i] && r.obs_std.y[i] > std_limit;
        r.mask_std.bits[i] = bad ? 0 : (s.valid[i] ? 1 : 0);
        if (s.valid[i] && bad) r.reasons[i] |= kReasonStd;
    }

    // (4) rolling std of the quality factor: unstable segments
    FreqSeries q01 = s;
    for (std::size_t i = 0; i < n; ++i) {
        q01.y[i] = q.bits[i] ? 1.0 : 0.0;
        q01.valid[i] = s.valid[i];  // judge only where there was data
    }
    r.obs_qf = rolling_std(q01, cfg.qf_window_s);
    r.qf_limit_used = cfg.qf_limit;
    r.mask_qf = to_mask(s);
    for (std::size_t i = 0; i < n; ++i) {
        const bool bad = r.obs_qf.valid[i] && r.obs_qf.y[i] > cfg.qf_limit;
        r.mask_qf.bits[i] = bad ? 0 : (s.valid[i] ? 1 : 0);
        if (s.valid[i] && bad) r.reasons[i] |= kReasonQf;
    }

    r.final_mask = to_mask(s);
    for (std::size_t i = 0; i < n; ++i)
        r.final_mask.bits[i] = (s.valid[i] && q.bits[i] && r.mask_mean.bits[i] &&
                                r.mask_std.bits[i] && r.mask_qf.bits[i])
                                   ? 1
                                   : 0;
    return r;
}

UptimeReport uptime(const std::vector<std::pair<std::string, ValidityMask>>& masks) {
    if (masks.empty()) throw std::invalid_argument("uptime: no masks");
    // Common interval via AND-chain bookkeeping.
    ValidityMask all = masks.front().second;
    for (std::size_t k = 1; k < masks.size(); ++k) all = mask_and(all, masks[k].second);

    UptimeReport rep;
    for (const auto& [label, m] : masks) {
        // restrict each element to the common interval
        ValidityMask ones;
        ones.t0_mjd = all.t0_mjd;
        ones.gate_s = all.gate_s;
        ones.bits.assign(all.size(), 1);
        ValidityMask on_common = mask_and(m, ones);
        rep.per_element.emplace_back(label, uptime_fraction(on_common));
    }
    rep.combined = uptime_fraction(all);
    return rep;
}

std::string UptimeReport::format() const {
    std::ostringstream ss;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-28s %10s\n", "element", "uptime/%");
    ss << buf;
    for (const auto& [label, u] : per_element) {
        std::snprintf(buf, sizeof buf, "%-28s %10.2f\n", label.c_str(), 100.0 * u);
        ss << buf;
    }
    std::snprintf(buf, sizeof buf, "%-28s %10.2f\n", "combined", 100.0 * combined);
    ss << buf;
    return ss.str();
}

double uptime_product(const std::vector<double>& fractions) {
    double p = 1.0;
    for (double f : fractions) {
        if (f < 0.0 || f > 1.0)
            throw std::invalid_argument("uptime_product: fractions must lie in [0, 1]");
        p *= f;
    }
    return p;
}

double ceil_one_digit(double v) {
    if (v == 0.0) return 0.0;
    const double sign = v < 0.0 ? -1.0 : 1.0;
    const double a = std::abs(v);
    const double e = std::floor(std::log10(a));
    const double scale = std::pow(10.0, e);
    double mant = a / scale;
    // tolerate representation error so 5e-20 stays 5e-20
    double up = std::ceil(mant - 1e-9);
    if (up < 1.0) up = 1.0;
    if (up >= 10.0) return sign * 1.0 * std::pow(10.0, e + 1.0);
    return sign * up * scale;
}

BudgetTotal combine_budget(const UncertaintyBudget& b) {
    if (b.entries.empty()) throw std::invalid_argument("combine_budget: no entries");
    BudgetTotal t;
    double q = 0.0;
    for (const auto& e : b.entries) {
        if (e.uncertainty < 0.0)
            throw std::invalid_argument("combine_budget: uncertainties must be >= 0");
        t.bias += e.bias;
        q += e.uncertainty * e.uncertainty;
    }
    t.quadrature = std::sqrt(q);
    t.uncertainty = t.quadrature;
    if (b.policy == BudgetPolicy::ConservativeCeiling)
        t.uncertainty = std::max(ceil_one_digit(t.quadrature), t.quadrature);
    return t;
}

FreqSeries apply_correction(const FreqSeries& comparison, const FreqSeries& correction) {
    comparison.check();
    correction.check();
    if (comparison.size() != correction.size() ||
        detail::grid_offset(comparison.t0_mjd, correction.t0_mjd, comparison.gate_s,
                            correction.gate_s) != 0)
        throw std::invalid_argument("apply_correction: timebases differ");
    FreqSeries out = comparison;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.y[i] -= correction.y[i];
        out.valid[i] = (out.valid[i] && correction.valid[i]) ? 1 : 0;
    }
    return out;
}

}  // namespace fiberlink

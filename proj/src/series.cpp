#include "fiberlink/series.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace fiberlink {

std::size_t FreqSeries::valid_count() const {
    std::size_t n = 0;
    for (auto v : valid) n += (v != 0);
    return n;
}

void FreqSeries::check() const {
    if (valid.size() != y.size())
        throw std::invalid_argument("FreqSeries: valid mask length differs from data length");
    if (!(gate_s > 0.0)) throw std::invalid_argument("FreqSeries: gate must be positive");
    if (!(nu0_hz > 0.0)) throw std::invalid_argument("FreqSeries: nu0 must be positive");
}

FreqSeries make_series(std::vector<double> y, double gate_s, double t0_mjd, double nu0_hz) {
    FreqSeries s;
    s.t0_mjd = t0_mjd;
    s.gate_s = gate_s;
    s.nu0_hz = nu0_hz;
    s.valid.assign(y.size(), 1);
    s.y = std::move(y);
    s.check();
    return s;
}

namespace {

// Window width in samples: round to nearest, at least 1.
std::size_t window_samples(const FreqSeries& s, double window_s) {
    if (s.y.empty()) throw std::invalid_argument("rolling window on empty series");
    if (window_s < s.gate_s)
        throw std::invalid_argument("rolling window shorter than the gate time");
    double span = static_cast<double>(s.y.size()) * s.gate_s;
    if (window_s > span)
        throw std::invalid_argument("rolling window larger than the series span");
    auto w = static_cast<std::size_t>(std::llround(window_s / s.gate_s));
    return std::max<std::size_t>(w, 1);
}

// Prefix sums over valid samples, values shifted by an anchor so that
// windowed second moments do not cancel catastrophically.
struct Prefix {
    std::vector<double> s1, s2;
    std::vector<std::size_t> cnt;
    double anchor = 0.0;
};

Prefix build_prefix(const FreqSeries& s, bool squares) {
    Prefix p;
    const std::size_t n = s.y.size();
    double acc = 0.0;
    std::size_t nv = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (s.valid[i]) { acc += s.y[i]; ++nv; }
    p.anchor = nv ? acc / static_cast<double>(nv) : 0.0;

    p.s1.assign(n + 1, 0.0);
    p.cnt.assign(n + 1, 0);
    if (squares) p.s2.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double d = s.valid[i] ? (s.y[i] - p.anchor) : 0.0;
        p.s1[i + 1] = p.s1[i] + d;
        p.cnt[i + 1] = p.cnt[i] + (s.valid[i] ? 1 : 0);
        if (squares) p.s2[i + 1] = p.s2[i] + d * d;
    }
    return p;
}

}  // namespace

FreqSeries rolling_mean(const FreqSeries& s, double window_s) {
    s.check();
    const std::size_t w = window_samples(s, window_s);
    const std::size_t n = s.y.size();
    const std::size_t lo = (w - 1) / 2;      // samples before the center
    const std::size_t hi = w - 1 - lo;       // samples after the center
    Prefix p = build_prefix(s, false);

    FreqSeries out = s;
    out.y.assign(n, 0.0);
    out.valid.assign(n, 0);
    for (std::size_t i = lo; i + hi < n; ++i) {
        const std::size_t a = i - lo, b = i + hi + 1;
        const std::size_t nv = p.cnt[b] - p.cnt[a];
        if (2 * nv < w || nv == 0) continue;
        out.y[i] = p.anchor + (p.s1[b] - p.s1[a]) / static_cast<double>(nv);
        out.valid[i] = 1;
    }
    return out;
}

FreqSeries rolling_std(const FreqSeries& s, double window_s) {
    s.check();
    const std::size_t w = window_samples(s, window_s);
    const std::size_t n = s.y.size();
    const std::size_t lo = (w - 1) / 2;
    const std::size_t hi = w - 1 - lo;
    Prefix p = build_prefix(s, true);

    FreqSeries out = s;
    out.y.assign(n, 0.0);
    out.valid.assign(n, 0);
    for (std::size_t i = lo; i + hi < n; ++i) {
        const std::size_t a = i - lo, b = i + hi + 1;
        const std::size_t nv = p.cnt[b] - p.cnt[a];
        if (2 * nv < w || nv < 2) continue;
        const double s1 = p.s1[b] - p.s1[a];
        const double s2 = p.s2[b] - p.s2[a];
        double var = (s2 - s1 * s1 / static_cast<double>(nv)) / static_cast<double>(nv - 1);
        out.y[i] = std::sqrt(std::max(var, 0.0));
        out.valid[i] = 1;
    }
    return out;
}

FreqSeries rolling_median(const FreqSeries& s, double window_s) {
    s.check();
    const std::size_t w = window_samples(s, window_s);
    const std::size_t n = s.y.size();
    const std::size_t lo = (w - 1) / 2;
    const std::size_t hi = w - 1 - lo;

    FreqSeries out = s;
    out.y.assign(n, 0.0);
    out.valid.assign(n, 0);

    // Sliding multiset split at the median; rebuilt bookkeeping is O(log w)
    // per step.
    std::multiset<double> low, high;  // max half / min half, |low| >= |high|
    auto rebalance = [&] {
        while (low.size() > high.size() + 1) {
            auto it = std::prev(low.end());
            high.insert(*it);
            low.erase(it);
        }
        while (high.size() > low.size()) {
            auto it = high.begin();
            low.insert(*it);
            high.erase(it);
        }
    };
    auto insert = [&](double v) {
        if (low.empty() || v <= *std::prev(low.end())) low.insert(v);
        else high.insert(v);
        rebalance();
    };
    auto erase = [&](double v) {
        if (auto it = low.find(v); it != low.end()) low.erase(it);
        else high.erase(high.find(v));
        rebalance();
    };
    auto median = [&] {
        if ((low.size() + high.size()) % 2 == 1) return *std::prev(low.end());
        return 0.5 * (*std::prev(low.end()) + *high.begin());
    };

    std::size_t win_begin = 0, win_end = 0;  // current [win_begin, win_end)
    for (std::size_t i = lo; i + hi < n; ++i) {
        const std::size_t a = i - lo, b = i + hi + 1;
        while (win_end < b) {
            if (s.valid[win_end]) insert(s.y[win_end]);
            ++win_end;
        }
        while (win_begin < a) {
            if (s.valid[win_begin]) erase(s.y[win_begin]);
            ++win_begin;
        }
        const std::size_t nv = low.size() + high.size();
        if (2 * nv < w || nv == 0) continue;
        out.y[i] = median();
        out.valid[i] = 1;
    }
    return out;
}

SummaryStats summary_stats(const FreqSeries& s) {
    s.check();
    std::vector<double> vals;
    vals.reserve(s.y.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < s.y.size(); ++i)
        if (s.valid[i]) { vals.push_back(s.y[i]); sum += s.y[i]; }
    if (vals.empty()) throw std::invalid_argument("summary_stats: no valid samples");

    SummaryStats st;
    st.count = vals.size();
    st.mean = sum / static_cast<double>(vals.size());
    const std::size_t mid = vals.size() / 2;
    std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
    if (vals.size() % 2 == 1) {
        st.median = vals[mid];
    } else {
        double upper = vals[mid];
        double lower = *std::max_element(vals.begin(), vals.begin() + mid);
        st.median = 0.5 * (lower + upper);
    }
    return st;
}

Histogram histogram(const FreqSeries& s, double bin_width_hz) {
    s.check();
    if (!(bin_width_hz > 0.0)) throw std::invalid_argument("histogram: bin width must be positive");
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < s.y.size(); ++i) {
        if (!s.valid[i]) continue;
        const double df = s.y[i] * s.nu0_hz;
        if (!any) { lo = hi = df; any = true; }
        lo = std::min(lo, df);
        hi = std::max(hi, df);
    }
    if (!any) throw std::invalid_argument("histogram: no valid samples");

    Histogram h;
    h.bin_width_hz = bin_width_hz;
    const double first = std::floor(lo / bin_width_hz) * bin_width_hz;
    auto nbins = static_cast<std::size_t>(std::floor((hi - first) / bin_width_hz)) + 1;
    h.counts.assign(nbins, 0);
    h.edges.resize(nbins + 1);
    for (std::size_t b = 0; b <= nbins; ++b)
        h.edges[b] = first + static_cast<double>(b) * bin_width_hz;

    for (std::size_t i = 0; i < s.y.size(); ++i) {
        if (!s.valid[i]) continue;
        const double df = s.y[i] * s.nu0_hz;
        auto b = static_cast<std::size_t>(std::floor((df - first) / bin_width_hz));
        if (b >= nbins) b = nbins - 1;  // top edge belongs to the last bin
        ++h.counts[b];
    }
    return h;
}

ValidityMask to_mask(const FreqSeries& s) {
    ValidityMask m;
    m.t0_mjd = s.t0_mjd;
    m.gate_s = s.gate_s;
    m.bits = s.valid;
    return m;
}

namespace detail {

std::int64_t grid_offset(double a_t0, double b_t0, double gate_a, double gate_b) {
    if (std::abs(gate_a - gate_b) > 1e-9 * std::max(gate_a, gate_b))
        throw std::invalid_argument("timebase combination: gate mismatch");
    const double k = (b_t0 - a_t0) * constants::seconds_per_day / gate_a;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-6)
        throw std::invalid_argument("timebase combination: sample grids misaligned");
    return static_cast<std::int64_t>(r);
}

}  // namespace detail

ValidityMask mask_and(const ValidityMask& a, const ValidityMask& b) {
    const std::int64_t off = detail::grid_offset(a.t0_mjd, b.t0_mjd, a.gate_s, b.gate_s);
    const std::int64_t begin = std::max<std::int64_t>(0, off);
    const std::int64_t end =
        std::min<std::int64_t>(static_cast<std::int64_t>(a.size()),
                               off + static_cast<std::int64_t>(b.size()));
    if (begin >= end) throw std::invalid_argument("mask_and: timebases do not overlap");

    ValidityMask out;
    out.gate_s = a.gate_s;
    out.t0_mjd = a.t0_mjd + static_cast<double>(begin) * a.gate_s / constants::seconds_per_day;
    out.bits.resize(static_cast<std::size_t>(end - begin));
    for (std::int64_t i = begin; i < end; ++i)
        out.bits[static_cast<std::size_t>(i - begin)] =
            (a.bits[static_cast<std::size_t>(i)] && b.bits[static_cast<std::size_t>(i - off)]) ? 1 : 0;
    return out;
}

double uptime_fraction(const ValidityMask& m) {
    if (m.bits.empty()) throw std::invalid_argument("uptime of an empty mask");
    std::size_t n = 0;
    for (auto b : m.bits) n += (b != 0);
    return static_cast<double>(n) / static_cast<double>(m.bits.size());
}

FreqSeries apply_mask(const FreqSeries& s, const ValidityMask& m) {
    const std::int64_t off = detail::grid_offset(s.t0_mjd, m.t0_mjd, s.gate_s, m.gate_s);
    FreqSeries out = s;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::int64_t j = static_cast<std::int64_t>(i) - off;
        const bool covered = j >= 0 && j < static_cast<std::int64_t>(m.size());
        if (!covered)
            throw std::invalid_argument("apply_mask: mask does not cover the series");
        out.valid[i] = (out.valid[i] && m.bits[static_cast<std::size_t>(j)]) ? 1 : 0;
    }
    return out;
}

}  // namespace fiberlink

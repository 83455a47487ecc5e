#include "fiberlink/stability.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "fiberlink/version.hpp"

namespace fiberlink {

namespace {

std::size_t tau_to_m(double tau_s, double gate_s) {
    const double k = tau_s / gate_s;
    const double r = std::round(k);
    if (r < 1.0 || std::abs(k - r) > 1e-6)
        throw std::invalid_argument("tau must be a positive integer multiple of the gate");
    return static_cast<std::size_t>(r);
}

// Prefix sums of anchored values and of the valid count. The anchor keeps a
// constant series at exactly zero deviation.
struct Prefix {
    std::vector<double> sum;
    std::vector<std::size_t> cnt;
    double anchor = 0.0;
};

Prefix build(const FreqSeries& s) {
    Prefix p;
    const std::size_t n = s.size();
    double acc = 0.0;
    std::size_t nv = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (s.valid[i]) { acc += s.y[i]; ++nv; }
    p.anchor = nv ? acc / static_cast<double>(nv) : 0.0;
    p.sum.assign(n + 1, 0.0);
    p.cnt.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        p.sum[i + 1] = p.sum[i] + (s.valid[i] ? s.y[i] - p.anchor : 0.0);
        p.cnt[i + 1] = p.cnt[i] + (s.valid[i] ? 1 : 0);
    }
    return p;
}

}  // namespace

double StabilityCurve::at_tau(double tau_s) const {
    for (std::size_t i = 0; i < taus_s.size(); ++i)
        if (std::abs(taus_s[i] - tau_s) <= 1e-9 * tau_s) return values[i];
    return -1.0;
}

StabilityCurve adev(const FreqSeries& s, const std::vector<double>& taus_s) {
    s.check();
    const std::size_t n = s.size();
    Prefix p = build(s);
    StabilityCurve c;
    for (double tau : taus_s) {
        const std::size_t m = tau_to_m(tau, s.gate_s);
        if (n < 2 * m + 1) {
            c.warnings.push_back("tau " + std::to_string(tau) + " s omitted: record too short");
            continue;
        }
        double sum2 = 0.0;
        std::size_t terms = 0;
        const double dm = static_cast<double>(m);
        for (std::size_t j = 0; j + 2 * m <= n; ++j) {
            // term uses y[j .. j+2m-1], split into two m-sample averages
            if (p.cnt[j + m] - p.cnt[j] != m) continue;
            if (p.cnt[j + 2 * m] - p.cnt[j + m] != m) continue;
            const double a0 = (p.sum[j + m] - p.sum[j]) / dm;
            const double a1 = (p.sum[j + 2 * m] - p.sum[j + m]) / dm;
            const double z = a1 - a0;
            sum2 += z * z;
            ++terms;
        }
        if (terms == 0) {
            c.warnings.push_back("tau " + std::to_string(tau) + " s omitted: no surviving terms");
            continue;
        }
        c.taus_s.push_back(dm * s.gate_s);
        c.values.push_back(std::sqrt(sum2 / (2.0 * static_cast<double>(terms))));
        c.counts.push_back(terms);
    }
    return c;
}

StabilityCurve mdev(const FreqSeries& s, const std::vector<double>& taus_s) {
    s.check();
    const std::size_t n = s.size();
    Prefix p = build(s);
    StabilityCurve c;
    for (double tau : taus_s) {
        const std::size_t m = tau_to_m(tau, s.gate_s);
        if (n < 3 * m) {
            c.warnings.push_back("tau " + std::to_string(tau) + " s omitted: record too short");
            continue;
        }
        const double dm = static_cast<double>(m);

        // z[i] = mean(y[i+m .. i+2m-1]) - mean(y[i .. i+m-1]); inner sums of
        // m consecutive z values via a second prefix-sum pass.
        const std::size_t nz = n - 2 * m + 1;
        std::vector<double> zsum(nz + 1, 0.0);
        std::vector<std::size_t> zcnt(nz + 1, 0);
        for (std::size_t i = 0; i < nz; ++i) {
            const bool ok = (p.cnt[i + m] - p.cnt[i] == m) && (p.cnt[i + 2 * m] - p.cnt[i + m] == m);
            double z = 0.0;
            if (ok) {
                const double a0 = (p.sum[i + m] - p.sum[i]) / dm;
                const double a1 = (p.sum[i + 2 * m] - p.sum[i + m]) / dm;
                z = a1 - a0;
            }
            zsum[i + 1] = zsum[i] + z;
            zcnt[i + 1] = zcnt[i] + (ok ? 1 : 0);
        }

        double sum2 = 0.0;
        std::size_t terms = 0;
        for (std::size_t j = 0; j + m <= nz; ++j) {
            if (zcnt[j + m] - zcnt[j] != m) continue;  // needs y[j .. j+3m-2] all valid
            const double inner = zsum[j + m] - zsum[j];
            sum2 += inner * inner;
            ++terms;
        }
        if (terms == 0) {
            c.warnings.push_back("tau " + std::to_string(tau) + " s omitted: no surviving terms");
            continue;
        }
        c.taus_s.push_back(dm * s.gate_s);
        c.values.push_back(std::sqrt(sum2 / (2.0 * dm * dm * static_cast<double>(terms))));
        c.counts.push_back(terms);
    }
    return c;
}

double sinusoid_fm_adev(double y0, double f_m_hz, double tau_s) {
    if (!(f_m_hz > 0.0) || !(tau_s > 0.0))
        throw std::invalid_argument("sinusoid_fm_adev: f_m and tau must be positive");
    const double x = std::numbers::pi * f_m_hz * tau_s;
    const double sx = std::sin(x);
    return y0 * sx * sx / x;
}

std::vector<double> default_taus(double gate_s, double max_tau_s) {
    std::vector<double> taus;
    static const int digits[3] = {1, 2, 5};
    for (double decade = 1.0;; decade *= 10.0) {
        for (int d : digits) {
            const double tau = gate_s * decade * d;
            if (tau > max_tau_s * (1.0 + 1e-12)) return taus;
            taus.push_back(tau);
        }
        if (decade > max_tau_s / gate_s) return taus;
    }
}

namespace {
void put_meta(std::FILE* f, const std::map<std::string, std::string>& meta) {
    std::fprintf(f, "# fiberlink %s\n", kVersion);
    for (const auto& [k, v] : meta) std::fprintf(f, "# %s = %s\n", k.c_str(), v.c_str());
}
}  // namespace

void write_curve(const std::string& path, const StabilityCurve& a, const StabilityCurve& m,
                 const std::map<std::string, std::string>& meta) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    put_meta(f, meta);
    std::fprintf(f, "# columns = tau_s\tadev\tmdev\tn_terms\n");
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double md = m.at_tau(a.taus_s[i]);
        if (md < 0.0) continue;
        std::fprintf(f, "%.17g\t%.17g\t%.17g\t%zu\n", a.taus_s[i], a.values[i], md, a.counts[i]);
    }
    std::fclose(f);
}

void write_histogram(const std::string& path, const Histogram& h,
                     const std::map<std::string, std::string>& meta) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    put_meta(f, meta);
    std::fprintf(f, "# bin_width_hz = %.17g\n", h.bin_width_hz);
    std::fprintf(f, "# columns = bin_left_hz\tbin_right_hz\tcount\n");
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        std::fprintf(f, "%.17g\t%.17g\t%llu\n", h.edges[i], h.edges[i + 1],
                     static_cast<unsigned long long>(h.counts[i]));
    std::fclose(f);
}

}  // namespace fiberlink

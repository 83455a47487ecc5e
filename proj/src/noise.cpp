#include "fiberlink/noise.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fiberlink/fft.hpp"

namespace fiberlink {

namespace {
constexpr double kPi = std::numbers::pi;

// Gaussian deviates via Box-Muller on explicit 53-bit uniforms; kept
// hand-rolled so the byte stream is identical across standard libraries.
class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    double uniform() {  // (0, 1)
        return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    }
    double operator()() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_ = false;
};

}  // namespace

namespace detail {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::vector<double> synthesize_psd(const std::function<double(double)>& psd_one_sided,
                                   std::size_t n, double gate_s, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("synthesize_psd: need at least two samples");
    if (!(gate_s > 0.0)) throw std::invalid_argument("synthesize_psd: gate must be positive");

    // Generate on a record twice the requested length to soften the
    // periodicity of the circular synthesis, then keep the first n samples.
    const std::size_t m = next_pow2(2 * n);
    const double df = 1.0 / (static_cast<double>(m) * gate_s);

    Gaussian gauss(seed);
    std::vector<std::complex<double>> spec(m, {0.0, 0.0});
    // E|X_k|^2 = S_y(f_k) * m / (2 gate) makes the periodogram of the output
    // match the requested one-sided PSD.
    for (std::size_t k = 1; k < m / 2; ++k) {
        const double f = static_cast<double>(k) * df;
        const double s = psd_one_sided(f);
        const double amp = s > 0.0 ? std::sqrt(s * static_cast<double>(m) / (2.0 * gate_s)) : 0.0;
        const double re = amp * gauss() * std::numbers::sqrt2 / 2.0;
        const double im = amp * gauss() * std::numbers::sqrt2 / 2.0;
        spec[k] = {re, im};
        spec[m - k] = {re, -im};
    }
    {   // Nyquist bin is its own conjugate: real
        const double f = static_cast<double>(m / 2) * df;
        const double s = psd_one_sided(f);
        const double amp = s > 0.0 ? std::sqrt(s * static_cast<double>(m) / (2.0 * gate_s)) : 0.0;
        spec[m / 2] = {amp * gauss(), 0.0};
    }

    fft_radix2(spec, true);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real();
    return out;
}

}  // namespace detail

bool NoiseSpec::all_zero() const {
    for (double v : h)
        if (v != 0.0) return false;
    return drift_rate == 0.0 && sinusoids.empty() && slip_rate == 0.0 && gap_rate == 0.0;
}

double thermal_peak_y(const ThermalModel& tm) {
    const double scale = tm.length_m * tm.kappa_per_k * tm.temp_amplitude_k / constants::c_light_m_s;
    switch (tm.waveform) {
        case TempWaveform::Sinusoid:
            return scale * 2.0 * kPi / tm.temp_period_s;
        case TempWaveform::Ramp:
            return scale / tm.temp_period_s;
    }
    return 0.0;
}

FreqSeries gen_power_law(const NoiseSpec& spec, std::size_t n, double gate_s,
                         double t0_mjd, double nu0_hz) {
    if (n < 2) throw std::invalid_argument("gen_power_law: need at least two samples");
    for (double v : spec.h)
        if (v < 0.0) throw std::invalid_argument("gen_power_law: PSD coefficients must be >= 0");

    FreqSeries s;
    s.t0_mjd = t0_mjd;
    s.gate_s = gate_s;
    s.nu0_hz = nu0_hz;
    s.valid.assign(n, 1);

    bool any_h = false;
    for (double v : spec.h) any_h |= (v != 0.0);
    if (any_h) {
        auto psd = [&spec](double f) {
            double v = 0.0;
            for (int a = -2; a <= 2; ++a) {
                const double ha = spec.h_alpha(a);
                if (ha != 0.0) v += ha * std::pow(f, static_cast<double>(a));
            }
            return v;
        };
        s.y = detail::synthesize_psd(psd, n, gate_s, detail::mix_seed(spec.seed, 0));
    } else {
        s.y.assign(n, 0.0);
    }

    if (spec.drift_rate != 0.0)
        for (std::size_t i = 0; i < n; ++i)
            s.y[i] += spec.drift_rate * static_cast<double>(i) * gate_s;

    for (const auto& sine : spec.sinusoids) {
        if (!(sine.period_s > 0.0))
            throw std::invalid_argument("gen_power_law: sinusoid period must be positive");
        const double w = 2.0 * kPi / sine.period_s;
        for (std::size_t i = 0; i < n; ++i)
            s.y[i] += sine.amplitude_y * std::sin(w * static_cast<double>(i) * gate_s + sine.phase_rad);
    }

    if (spec.slip_rate > 0.0) s = inject_cycle_slips(s, detail::draw_slips(spec, n, gate_s));
    if (spec.gap_rate > 0.0 && spec.gap_mean_s > 0.0)
        s = inject_gaps(s, detail::draw_gaps(spec, n, gate_s));
    return s;
}

namespace detail {

std::vector<std::pair<std::size_t, int>> draw_slips(const NoiseSpec& spec, std::size_t n,
                                                    double gate_s) {
    std::vector<std::pair<std::size_t, int>> slips;
    if (spec.slip_rate <= 0.0) return slips;
    Gaussian rng(mix_seed(spec.seed, 1));
    const double p = spec.slip_rate * gate_s;
    for (std::size_t i = 0; i < n; ++i)
        if (rng.uniform() < p) slips.emplace_back(i, rng.uniform() < 0.5 ? 1 : -1);
    return slips;
}

std::vector<std::pair<std::size_t, std::size_t>> draw_gaps(const NoiseSpec& spec, std::size_t n,
                                                           double gate_s) {
    std::vector<std::pair<std::size_t, std::size_t>> gaps;
    if (spec.gap_rate <= 0.0 || spec.gap_mean_s <= 0.0) return gaps;
    Gaussian rng(mix_seed(spec.seed, 2));
    const double p = spec.gap_rate * gate_s;
    const double mean_len = std::max(spec.gap_mean_s / gate_s, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform() >= p) continue;
        // geometric length with the configured mean
        const double u = rng.uniform();
        auto len = static_cast<std::size_t>(std::ceil(std::log(u) / std::log(1.0 - 1.0 / mean_len)));
        len = std::max<std::size_t>(len, 1);
        len = std::min(len, n - i);
        gaps.emplace_back(i, len);
    }
    return gaps;
}

}  // namespace detail

FreqSeries thermal_phase_series(const ThermalModel& tm, std::size_t n, double gate_s,
                                double t0_mjd) {
    if (tm.length_m < 0.0) throw std::invalid_argument("thermal model: length must be >= 0");
    if (!(tm.kappa_per_k > 0.0)) throw std::invalid_argument("thermal model: kappa must be positive");
    if (!(tm.temp_period_s > 0.0)) throw std::invalid_argument("thermal model: period must be positive");

    FreqSeries s;
    s.t0_mjd = t0_mjd;
    s.gate_s = gate_s;
    s.nu0_hz = tm.nu0_hz;
    s.valid.assign(n, 1);
    s.y.assign(n, 0.0);

    const double scale = tm.length_m * tm.kappa_per_k * tm.temp_amplitude_k / constants::c_light_m_s;
    switch (tm.waveform) {
        case TempWaveform::Sinusoid: {
            const double w = 2.0 * kPi / tm.temp_period_s;
            for (std::size_t i = 0; i < n; ++i)
                s.y[i] = scale * w * std::cos(w * static_cast<double>(i) * gate_s + tm.temp_phase_rad);
            break;
        }
        case TempWaveform::Ramp: {
            // sawtooth temperature: constant derivative between wraps
            const double v = scale / tm.temp_period_s;
            for (std::size_t i = 0; i < n; ++i) s.y[i] = v;
            break;
        }
    }
    return s;
}

FreqSeries inject_cycle_slips(const FreqSeries& s,
                              const std::vector<std::pair<std::size_t, int>>& slips) {
    s.check();
    FreqSeries out = s;
    const double hop = 1.0 / (s.gate_s * s.nu0_hz);
    for (const auto& [idx, sign] : slips) {
        if (idx >= out.size()) throw std::invalid_argument("inject_cycle_slips: index out of range");
        out.y[idx] += static_cast<double>(sign) * hop;
    }
    return out;
}

FreqSeries inject_gaps(const FreqSeries& s,
                       const std::vector<std::pair<std::size_t, std::size_t>>& gaps) {
    s.check();
    FreqSeries out = s;
    for (const auto& [start, len] : gaps) {
        if (start > out.size() || len > out.size() - start)
            throw std::invalid_argument("inject_gaps: gap out of range");
        for (std::size_t i = start; i < start + len; ++i) out.valid[i] = 0;
    }
    return out;
}

FreqSeries compose(const std::vector<FreqSeries>& parts) {
    if (parts.empty()) throw std::invalid_argument("compose: no parts");
    FreqSeries out = parts.front();
    out.check();
    for (std::size_t p = 1; p < parts.size(); ++p) {
        const FreqSeries& q = parts[p];
        q.check();
        if (q.size() != out.size() ||
            detail::grid_offset(out.t0_mjd, q.t0_mjd, out.gate_s, q.gate_s) != 0)
            throw std::invalid_argument("compose: timebases differ");
        if (std::abs(q.nu0_hz - out.nu0_hz) > 1e-6 * out.nu0_hz)
            throw std::invalid_argument("compose: carrier frequencies differ");
        for (std::size_t i = 0; i < out.size(); ++i) {
            out.y[i] += q.y[i];
            out.valid[i] = (out.valid[i] && q.valid[i]) ? 1 : 0;
        }
    }
    return out;
}

double white_fm_coeff(double sigma_at_gate, double gate_s) {
    return 2.0 * sigma_at_gate * sigma_at_gate * gate_s;
}

double white_pm_coeff(double sigma_at_gate, double gate_s) {
    // First-difference Allan variance of band-limited sampled white PM:
    //   sigma^2(gate) = 2 h2 int_0^{1/(2g)} f^2 sin^2(pi f g) df
    //                 = h2 (1/24 + 1/(4 pi^2)) / g^3.
    const double denom = 1.0 / 24.0 + 1.0 / (4.0 * kPi * kPi);
    return sigma_at_gate * sigma_at_gate * gate_s * gate_s * gate_s / denom;
}

}  // namespace fiberlink

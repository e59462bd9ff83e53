#include "sbw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sbw::analysis {

namespace {

using std::numbers::pi;
using cplx = std::complex<double>;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// iterative radix-2 Cooley-Tukey, in place, size must be a power of two
void fft_inplace(std::vector<cplx>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * pi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx even = a[i + k];
                const cplx odd = a[i + k + len / 2] * w;
                a[i + k] = even + odd;
                a[i + k + len / 2] = even - odd;
                w *= wl;
            }
        }
    }
}

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(n));
    return w;
}

struct Spectra {
    std::vector<double> freq;
    std::vector<double> sxx;
    std::vector<double> syy;
    std::vector<cplx> sxy;
};

// shared Welch core; y empty => auto-spectrum only
Spectra welch_core(std::span<const double> x, std::span<const double> y, const WelchConfig& cfg) {
    cfg.validate(x.size());
    const bool cross = !y.empty();
    if (cross && y.size() != x.size())
        throw DimensionError("welch: signals must have equal length");

    const std::size_t seg = cfg.segment;
    const std::size_t nfft = next_pow2(seg);
    const std::size_t half = nfft / 2;
    const std::size_t hop =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(
                                     static_cast<double>(seg) * (1.0 - cfg.overlap))));

    const std::vector<double> win = hann_window(seg);
    double win_power = 0.0;
    for (double w : win) win_power += w * w;

    Spectra out;
    out.freq.resize(half + 1);
    for (std::size_t i = 0; i <= half; ++i)
        out.freq[i] = static_cast<double>(i) * cfg.sample_rate / static_cast<double>(nfft);
    out.sxx.assign(half + 1, 0.0);
    if (cross) {
        out.syy.assign(half + 1, 0.0);
        out.sxy.assign(half + 1, cplx(0.0));
    }

    std::vector<cplx> bx(nfft), by;
    if (cross) by.resize(nfft);

    std::size_t nseg = 0;
    for (std::size_t start = 0; start + seg <= x.size(); start += hop, ++nseg) {
        std::fill(bx.begin(), bx.end(), cplx(0.0));
        for (std::size_t i = 0; i < seg; ++i) bx[i] = win[i] * x[start + i];
        fft_inplace(bx);
        if (cross) {
            std::fill(by.begin(), by.end(), cplx(0.0));
            for (std::size_t i = 0; i < seg; ++i) by[i] = win[i] * y[start + i];
            fft_inplace(by);
        }
        for (std::size_t i = 0; i <= half; ++i) {
            out.sxx[i] += std::norm(bx[i]);
            if (cross) {
                out.syy[i] += std::norm(by[i]);
                out.sxy[i] += std::conj(bx[i]) * by[i];
            }
        }
    }

    const double scale = 1.0 / (cfg.sample_rate * win_power * static_cast<double>(nseg));
    for (std::size_t i = 0; i <= half; ++i) {
        const double onesided = (i == 0 || i == half) ? 1.0 : 2.0;
        out.sxx[i] *= scale * onesided;
        if (cross) {
            out.syy[i] *= scale * onesided;
            out.sxy[i] *= scale * onesided;
        }
    }
    return out;
}

double norm_basis_value(std::span<const double> truth, NormBasis basis) {
    switch (basis) {
        case NormBasis::peak_to_peak: {
            const auto [lo, hi] = std::minmax_element(truth.begin(), truth.end());
            return *hi - *lo;
        }
        case NormBasis::rms: {
            double acc = 0.0;
            for (double v : truth) acc += v * v;
            return std::sqrt(acc / static_cast<double>(truth.size()));
        }
        case NormBasis::max_abs: {
            double m = 0.0;
            for (double v : truth) m = std::max(m, std::abs(v));
            return m;
        }
    }
    return 0.0;
}

void check_metric_inputs(std::span<const double> truth, std::span<const double> est) {
    if (truth.size() != est.size())
        throw DimensionError("normalized metric: signals must have equal length");
    if (truth.size() < 2) throw AnalysisError("normalized metric: need at least 2 samples");
}

}  // namespace

void WelchConfig::validate(std::size_t signal_length) const {
    if (segment < 8) throw ParamError("WelchConfig: segment must be >= 8 samples");
    if (segment > signal_length)
        throw AnalysisError("WelchConfig: signal shorter than one segment");
    if (!(overlap >= 0.0 && overlap < 1.0))
        throw ParamError("WelchConfig: overlap must lie in [0, 1)");
    if (!(sample_rate > 0.0)) throw ParamError("WelchConfig: sample rate must be > 0");
}

double normalized_rmse(std::span<const double> truth, std::span<const double> est,
                       NormBasis basis) {
    check_metric_inputs(truth, est);
    const double b = norm_basis_value(truth, basis);
    if (b <= 0.0) throw AnalysisError("normalized_rmse: degenerate normalization basis");
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double r = est[i] - truth[i];
        acc += r * r;
    }
    return 100.0 * std::sqrt(acc / static_cast<double>(truth.size())) / b;
}

double normalized_mae(std::span<const double> truth, std::span<const double> est,
                      NormBasis basis) {
    check_metric_inputs(truth, est);
    const double b = norm_basis_value(truth, basis);
    if (b <= 0.0) throw AnalysisError("normalized_mae: degenerate normalization basis");
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) acc += std::abs(est[i] - truth[i]);
    return 100.0 * (acc / static_cast<double>(truth.size())) / b;
}

double estimate_delay(std::span<const double> ref, std::span<const double> est, double ts,
                      std::size_t max_lag) {
    if (ref.size() != est.size())
        throw DimensionError("estimate_delay: signals must have equal length");
    if (!(ts > 0.0)) throw ParamError("estimate_delay: ts must be > 0");
    if (ref.size() < max_lag + 2)
        throw AnalysisError("estimate_delay: signals shorter than the lag search range");

    const std::size_t n = ref.size();
    double mr = 0.0, me = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mr += ref[i];
        me += est[i];
    }
    mr /= static_cast<double>(n);
    me /= static_cast<double>(n);

    std::vector<double> r(n), e(n);
    double er = 0.0, ee = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = ref[i] - mr;
        e[i] = est[i] - me;
        er += r[i] * r[i];
        ee += e[i] * e[i];
    }
    if (er == 0.0 || ee == 0.0)
        throw AnalysisError("estimate_delay: degenerate (constant) signal");

    double best = -2.0;
    std::size_t best_lag = 0;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double num = 0.0, dr = 0.0, de = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) {
            num += r[i] * e[i + lag];
            dr += r[i] * r[i];
            de += e[i + lag] * e[i + lag];
        }
        const double den = std::sqrt(dr * de);
        if (den == 0.0) continue;
        const double rho = num / den;
        if (rho > best) {
            best = rho;
            best_lag = lag;
        }
    }
    return static_cast<double>(best_lag) * ts;
}

Psd welch_psd(std::span<const double> x, const WelchConfig& cfg) {
    Spectra s = welch_core(x, {}, cfg);
    return Psd{std::move(s.freq), std::move(s.sxx)};
}

Csd welch_csd(std::span<const double> x, std::span<const double> y, const WelchConfig& cfg) {
    Spectra s = welch_core(x, y, cfg);
    return Csd{std::move(s.freq), std::move(s.sxy)};
}

std::vector<BodePoint> tf_estimate(std::span<const double> input, std::span<const double> output,
                                   const WelchConfig& cfg) {
    Spectra s = welch_core(input, output, cfg);

    double peak = 0.0;
    for (double v : s.sxx) peak = std::max(peak, v);
    if (peak <= 0.0) throw AnalysisError("tf_estimate: input has no power");

    std::vector<BodePoint> table;
    table.reserve(s.freq.size());
    double prev_phase = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < s.freq.size(); ++i) {
        if (s.sxx[i] < 1e-15 * peak) continue;  // insufficient excitation
        const cplx h = s.sxy[i] / s.sxx[i];
        double phase = std::atan2(h.imag(), h.real()) * 180.0 / pi;
        if (!first) {
            double d = phase - prev_phase;
            while (d > 180.0) d -= 360.0;
            while (d < -180.0) d += 360.0;
            phase = prev_phase + d;
        }
        prev_phase = phase;
        first = false;

        const double denom = s.sxx[i] * s.syy[i];
        double coh = denom > 0.0 ? std::norm(s.sxy[i]) / denom : 0.0;
        coh = std::clamp(coh, 0.0, 1.0);
        table.push_back(BodePoint{s.freq[i], 20.0 * std::log10(std::abs(h)), phase, coh});
    }
    return table;
}

double band_power(std::span<const double> x, double f_lo, double f_hi, const WelchConfig& cfg) {
    const double nyquist = 0.5 * cfg.sample_rate;
    if (!(f_lo >= 0.0 && f_lo < f_hi && f_hi <= nyquist))
        throw ParamError("band_power: need 0 <= f_lo < f_hi <= Nyquist");
    const Psd psd = welch_psd(x, cfg);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < psd.freq.size(); ++i) {
        if (psd.freq[i] >= f_lo && psd.freq[i + 1] <= f_hi) {
            acc += 0.5 * (psd.power[i] + psd.power[i + 1]) * (psd.freq[i + 1] - psd.freq[i]);
        }
    }
    return acc;
}

double tone_amplitude(std::span<const double> x, double f_hz, double sample_rate) {
    if (x.empty()) throw AnalysisError("tone_amplitude: empty signal");
    cplx acc(0.0);
    const double w = 2.0 * pi * f_hz / sample_rate;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i] * cplx(std::cos(w * static_cast<double>(i)), -std::sin(w * static_cast<double>(i)));
    }
    return 2.0 * std::abs(acc) / static_cast<double>(x.size());
}

double phase_at(const std::vector<BodePoint>& table, double f_hz) {
    if (table.empty()) throw AnalysisError("phase_at: empty Bode table");
    if (f_hz <= table.front().freq_hz) return table.front().phase_deg;
    if (f_hz >= table.back().freq_hz) return table.back().phase_deg;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        if (table[i].freq_hz <= f_hz && f_hz <= table[i + 1].freq_hz) {
            const double t = (f_hz - table[i].freq_hz) / (table[i + 1].freq_hz - table[i].freq_hz);
            return table[i].phase_deg + t * (table[i + 1].phase_deg - table[i].phase_deg);
        }
    }
    return table.back().phase_deg;
}

}  // namespace sbw::analysis

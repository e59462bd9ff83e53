#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sbw/errors.hpp"

namespace sbw::analysis {

/// Welch estimation setup; the FFT length is the segment length rounded up
/// to a power of two.
struct WelchConfig {
    std::size_t segment = 4096;   ///< samples per segment
    double overlap = 0.5;         ///< fraction in [0, 1)
    double sample_rate = 1000.0;  ///< [Hz]

    void validate(std::size_t signal_length) const;
};

struct Psd {
    std::vector<double> freq;   ///< [Hz], DC..Nyquist
    std::vector<double> power;  ///< one-sided density [unit^2/Hz]
};

struct Csd {
    std::vector<double> freq;
    std::vector<std::complex<double>> cross;
};

struct BodePoint {
    double freq_hz;
    double magnitude_db;
    double phase_deg;   ///< unwrapped
    double coherence;   ///< in [0, 1]
};

enum class NormBasis { peak_to_peak, rms, max_abs };

/// RMSE of (est - truth) divided by the chosen basis of the true signal, in
/// percent. Throws AnalysisError when the basis is degenerate (constant
/// true signal).
double normalized_rmse(std::span<const double> truth, std::span<const double> est,
                       NormBasis basis = NormBasis::peak_to_peak);
double normalized_mae(std::span<const double> truth, std::span<const double> est,
                      NormBasis basis = NormBasis::peak_to_peak);

/// Delay of est behind ref as the argmax of the normalized cross-correlation
/// over lags [0, max_lag], in seconds.
double estimate_delay(std::span<const double> ref, std::span<const double> est, double ts,
                      std::size_t max_lag = 100);

/// Hann-windowed averaged periodogram with window power normalization.
Psd welch_psd(std::span<const double> x, const WelchConfig& cfg);
Csd welch_csd(std::span<const double> x, std::span<const double> y, const WelchConfig& cfg);

/// H(f) = CSD(x, y) / PSD(x) per bin; magnitude in dB, phase unwrapped in
/// degrees anchored at the lowest excited bin, coherence |Sxy|^2/(Sxx Syy).
/// Bins with input power below 1e-15 of the peak are dropped.
std::vector<BodePoint> tf_estimate(std::span<const double> input, std::span<const double> output,
                                   const WelchConfig& cfg);

/// Trapezoid integral of the Welch PSD over [f_lo, f_hi].
double band_power(std::span<const double> x, double f_lo, double f_hi, const WelchConfig& cfg);

/// Amplitude of the single tone at f_hz (direct DFT correlation), used to
/// compare one spectral component across runs.
double tone_amplitude(std::span<const double> x, double f_hz, double sample_rate);

/// Linear interpolation of the unwrapped Bode phase at f_hz.
double phase_at(const std::vector<BodePoint>& table, double f_hz);

}  // namespace sbw::analysis

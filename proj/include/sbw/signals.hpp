#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "sbw/errors.hpp"

namespace sbw::signals {

/// Two-tone driver torque: a low-frequency intentional (active) sine and a
/// high-frequency impedance-induced (passive) sine.
struct DriverTorqueConfig {
    double f_act = 0.8;     ///< active frequency [Hz]
    double a_act = 2.0;     ///< active amplitude [Nm]
    double phase_act = 0.0; ///< [rad]
    double f_pas = 7.0;     ///< passive frequency [Hz]
    double a_pas = 0.5;     ///< passive amplitude [Nm]
    double phase_pas = 0.0; ///< [rad]

    void validate() const;
    /// Intentional steering sits below 2 Hz; a higher active frequency is
    /// legal but flagged.
    bool active_frequency_flagged() const { return f_act >= 2.0; }
};

struct DriverTorque {
    double active;
    double passive;
    double total;
};

DriverTorque driver_torque(const DriverTorqueConfig& cfg, double t);

/// Linear sweep used for nonparametric transfer-function identification.
struct ChirpConfig {
    double f0 = 0.5;        ///< start frequency [Hz]
    double f1 = 20.0;       ///< end frequency [Hz]
    double duration = 60.0; ///< [s]
    double amplitude = 1.0; ///< [Nm]

    void validate(double sample_time) const;
};

/// Excitation amplitude * sin(phase(t)); zero outside [0, duration].
double chirp(const ChirpConfig& cfg, double t);
/// Argument of the sweep sine, 2*pi*(f0*t + (f1-f0)*t^2/(2*duration)) [rad].
double chirp_phase(const ChirpConfig& cfg, double t);
/// Analytic phase derivative / 2*pi: f0 + (f1-f0)*t/duration [Hz].
double chirp_instantaneous_frequency(const ChirpConfig& cfg, double t);

/// Streaming first-order IIR high-pass (bilinear transform of s/(s+w_c) with
/// frequency prewarping so the -3 dB point lands exactly on the cutoff).
/// Orders above 1 cascade identical first-order sections.
class IirHighPass {
public:
    IirHighPass(double f_cut_hz, double sample_time_s, int order = 1);

    /// One direct-form step per section; stateful.
    double apply(double sample);
    void reset();

    double f_cut() const { return f_cut_; }
    double sample_time() const { return sample_time_; }
    int order() const { return order_; }

    /// Per-section coefficients: y[k] = b0 x[k] + b1 x[k-1] - a1 y[k-1].
    double b0() const { return b0_; }
    double b1() const { return b1_; }
    double a1() const { return a1_; }

    /// Frequency response H(e^{j 2 pi f T_s}) of the full cascade.
    std::complex<double> response(double f_hz) const;

private:
    double f_cut_;
    double sample_time_;
    int order_;
    double b0_, b1_, a1_;
    struct SectionState {
        double x1 = 0.0;
        double y1 = 0.0;
    };
    std::vector<SectionState> state_;
};

/// Reproducible Gaussian sampler: mt19937_64 + Box-Muller, independent of
/// the C++ library's distribution internals so a seed pins the sequence.
class GaussianNoise {
public:
    explicit GaussianNoise(std::uint64_t seed, double stddev = 1.0)
        : engine_(seed), stddev_(stddev) {
        if (stddev < 0.0) throw ParamError("GaussianNoise: stddev must be >= 0");
    }

    double next();

private:
    double uniform01();  // in (0, 1]

    std::mt19937_64 engine_;
    double stddev_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Convenience batch form of GaussianNoise.
std::vector<double> gaussian_noise(std::uint64_t seed, double stddev, std::size_t count);

}  // namespace sbw::signals

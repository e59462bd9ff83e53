#include "sbw/signals.hpp"

#include <cmath>
#include <numbers>

namespace sbw::signals {

using std::numbers::pi;

void DriverTorqueConfig::validate() const {
    if (f_act < 0.0 || f_pas < 0.0)
        throw ParamError("DriverTorqueConfig: frequencies must be >= 0");
    if (a_act < 0.0 || a_pas < 0.0)
        throw ParamError("DriverTorqueConfig: amplitudes must be >= 0");
}

DriverTorque driver_torque(const DriverTorqueConfig& cfg, double t) {
    DriverTorque out;
    out.active = cfg.a_act * std::sin(2.0 * pi * cfg.f_act * t + cfg.phase_act);
    out.passive = cfg.a_pas * std::sin(2.0 * pi * cfg.f_pas * t + cfg.phase_pas);
    out.total = out.active + out.passive;
    return out;
}

void ChirpConfig::validate(double sample_time) const {
    if (!(f0 >= 0.0 && f0 <= f1))
        throw ParamError("ChirpConfig: need 0 <= f0 <= f1");
    if (!(duration > 0.0)) throw ParamError("ChirpConfig: duration must be > 0");
    if (amplitude < 0.0) throw ParamError("ChirpConfig: amplitude must be >= 0");
    if (sample_time > 0.0 && !(f1 < 0.5 / sample_time))
        throw ParamError("ChirpConfig: f1 must stay below Nyquist");
}

double chirp_phase(const ChirpConfig& cfg, double t) {
    return 2.0 * pi * (cfg.f0 * t + (cfg.f1 - cfg.f0) * t * t / (2.0 * cfg.duration));
}

double chirp_instantaneous_frequency(const ChirpConfig& cfg, double t) {
    return cfg.f0 + (cfg.f1 - cfg.f0) * t / cfg.duration;
}

double chirp(const ChirpConfig& cfg, double t) {
    if (t < 0.0 || t > cfg.duration) return 0.0;
    return cfg.amplitude * std::sin(chirp_phase(cfg, t));
}

IirHighPass::IirHighPass(double f_cut_hz, double sample_time_s, int order)
    : f_cut_(f_cut_hz), sample_time_(sample_time_s), order_(order) {
    if (!(sample_time_s > 0.0)) throw ParamError("IirHighPass: sample time must be > 0");
    if (!(f_cut_hz > 0.0 && f_cut_hz < 0.5 / sample_time_s))
        throw ParamError("IirHighPass: cutoff must lie in (0, Nyquist)");
    if (order < 1) throw ParamError("IirHighPass: order must be >= 1");

    // prewarp so the -3 dB point of each section lands exactly on f_cut
    const double k = 2.0 / sample_time_s;
    const double wc = k * std::tan(pi * f_cut_hz * sample_time_s);
    const double a0 = k + wc;
    b0_ = k / a0;
    b1_ = -b0_;
    a1_ = (wc - k) / a0;
    state_.resize(static_cast<std::size_t>(order));
}

double IirHighPass::apply(double sample) {
    double v = sample;
    for (auto& s : state_) {
        const double y = b0_ * v + b1_ * s.x1 - a1_ * s.y1;
        s.x1 = v;
        s.y1 = y;
        v = y;
    }
    return v;
}

void IirHighPass::reset() {
    for (auto& s : state_) s = SectionState{};
}

std::complex<double> IirHighPass::response(double f_hz) const {
    const std::complex<double> zinv = std::exp(std::complex<double>(0.0, -2.0 * pi * f_hz * sample_time_));
    const std::complex<double> h = (b0_ + b1_ * zinv) / (1.0 + a1_ * zinv);
    std::complex<double> total = 1.0;
    for (int i = 0; i < order_; ++i) total *= h;
    return total;
}

double GaussianNoise::uniform01() {
    // 53-bit mantissa, shifted into (0, 1]
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double GaussianNoise::next() {
    if (stddev_ == 0.0) return 0.0;
    if (has_spare_) {
        has_spare_ = false;
        return stddev_ * spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return stddev_ * r * std::cos(theta);
}

std::vector<double> gaussian_noise(std::uint64_t seed, double stddev, std::size_t count) {
    GaussianNoise gen(seed, stddev);
    std::vector<double> out(count);
    for (auto& v : out) v = gen.next();
    return out;
}

}  // namespace sbw::signals

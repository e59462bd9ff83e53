#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sbw/analysis.hpp"
#include "sbw/config.hpp"

namespace sbw::simulation {

/// One sample of the closed loop. The torque columns at time t are the
/// zero-order-hold values applied over [t, t + T_s).
struct TraceRow {
    double t;
    double phi_sw, omega_sw, phi_m, omega_m;       // truth state
    double z_phi_m, z_omega_m;                     // noisy measurements
    double xh_phi_sw, xh_omega_sw, xh_phi_m, xh_omega_m, xh_t_d;  // estimate
    double t_d_active, t_d_passive, t_d_total;     // synthesized driver torque
    double t_d_hat_hp;                             // high-passed torque estimate
    double t_m;                                    // motor torque command
    double innov_phi_m, innov_omega_m;             // filter innovation
};

struct SimTrace {
    std::vector<TraceRow> rows;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::string config_echo;  // canonical key-value text
    bool diverged = false;
    std::size_t diverged_at_step = 0;
    std::string diagnostic;
};

/// Fixed-step closed loop: synthesize driver torque, advance the truth model
/// with it (linear: exact discrete transition; nonlinear: RK4), measure with
/// additive noise, run the disturbance-observer filter fed by its own
/// previous torque estimate and the applied motor torque, high-pass the
/// estimate, and compute the next motor command. Deterministic per seed.
SimTrace run_scenario(const ScenarioConfig& cfg);

/// Chirp-driven identification: runs the scenario with the chirp as driver
/// torque and returns tf_estimate(true T_d, estimated T_d) on the
/// post-warmup window.
std::vector<analysis::BodePoint> run_bode(const ScenarioConfig& cfg);

/// Headline metrics of one trace, computed on the post-warmup window.
struct MetricSummary {
    std::optional<double> delay_s;          ///< passive torque vs estimate
    double nrmse_total_pct = 0.0;           ///< total T_d vs estimate
    double nmae_total_pct = 0.0;
    std::optional<double> nrmse_passive_hp_pct;  ///< passive T_d vs high-passed estimate
    std::optional<double> nmae_passive_hp_pct;
    double band_power_omega_sw = 0.0;       ///< PSD integral of omega_sw above hp cutoff
    double tone_phi_sw_f_act = 0.0;         ///< amplitude of phi_sw at the active frequency
};

MetricSummary summarize(const SimTrace& trace, const ScenarioConfig& cfg);

/// CSV with a documented header plus a `.meta` sidecar (config echo, seed,
/// hash, row count) next to it; 17-significant-digit decimals round-trip
/// bit-exactly.
void persist_trace(const SimTrace& trace, const std::filesystem::path& csv_path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Reads back a persisted trace CSV (numeric columns only).
std::vector<TraceRow> load_trace_csv(const std::filesystem::path& csv_path);

extern const char* const kTraceHeader;

}  // namespace sbw::simulation

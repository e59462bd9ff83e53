#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sbw/analysis.hpp"
#include "sbw/control.hpp"
#include "sbw/dynamics.hpp"
#include "sbw/errors.hpp"
#include "sbw/estimation.hpp"
#include "sbw/signals.hpp"

namespace sbw::simulation {

enum class ModelKind { linear, nonlinear };
enum class FilterKind { kf, ekf, none };
enum class DriveKind { sines, chirp };

/// Complete, seedable description of one closed-loop run. Defaults mirror
/// the published parameter table; every field maps to one config-file key.
struct ScenarioConfig {
    double sample_time = 0.001;  ///< [s]
    double duration = 10.0;      ///< [s]
    double warmup = 1.0;         ///< excluded from metrics [s]
    ModelKind model = ModelKind::linear;
    FilterKind filter = FilterKind::kf;
    bool rejection = false;
    bool process_noise = false;
    std::uint64_t seed = 1;

    DriveKind drive = DriveKind::sines;
    signals::DriverTorqueConfig sines;
    signals::ChirpConfig chirp;

    dynamics::HwParams hw;
    control::ImpedanceParams impedance;
    estimation::NoiseConfig noise = estimation::NoiseConfig::defaults();

    double hp_cutoff = 4.0;  ///< IIR high-pass cutoff [Hz]
    int hp_order = 1;

    std::size_t welch_segment = 4096;
    double welch_overlap = 0.5;

    void validate() const;

    std::size_t step_count() const;  ///< rows = step_count() + 1
    analysis::WelchConfig welch_config() const;
};

/// Flat `key = value` schema (units follow the parameter table). The key set
/// is exactly the map produced here; `meta.*` keys are reserved for trace
/// sidecars and skipped on input.
std::map<std::string, std::string> to_key_values(const ScenarioConfig& cfg);
ScenarioConfig from_key_values(const std::map<std::string, std::string>& kv);

/// Parses config text; '#' starts a comment, blank lines allowed. Unknown
/// keys raise ConfigError carrying the key and line number.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config_file(const std::filesystem::path& path);

/// Applies `key=value` overrides (dotted key paths from the schema) on top
/// of a parsed config.
ScenarioConfig apply_overrides(const ScenarioConfig& cfg,
                               const std::vector<std::pair<std::string, std::string>>& overrides);

/// Canonical serialized form: every key, sorted, one per line.
std::string canonical_text(const ScenarioConfig& cfg);

/// FNV-1a 64-bit hash of the canonical text without the seed line, so runs
/// differing only by seed share a hash.
std::uint64_t config_hash(const ScenarioConfig& cfg);

std::string format_double(double v);  ///< %.17g, round-trips exactly

}  // namespace sbw::simulation

// sbwctl — command-line front end for the steer-by-wire hand-wheel
// disturbance-observer toolkit: scenario runs, Bode identification,
// observability reports, metric summaries, and parameter sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sbw/config.hpp"
#include "sbw/numerics.hpp"
#include "sbw/simulation.hpp"

namespace fs = std::filesystem;
using namespace sbw;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::vector<std::pair<std::string, std::string>> split_overrides(
    const std::vector<std::string>& raw) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& item : raw) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override must be key=value, got '" + item + "'");
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

simulation::ScenarioConfig load_config(const std::string& path,
                                       const std::vector<std::string>& overrides,
                                       std::optional<std::uint64_t> seed) {
    auto cfg = simulation::parse_config_file(path);
    cfg = simulation::apply_overrides(cfg, split_overrides(overrides));
    if (seed) {
        cfg = simulation::apply_overrides(cfg, {{"sim.seed", std::to_string(*seed)}});
    }
    return cfg;
}

void print_summary(const simulation::MetricSummary& m, const simulation::ScenarioConfig& cfg) {
    std::printf("metrics (post-warmup window, %.3g s excluded):\n", cfg.warmup);
    if (m.delay_s)
        std::printf("  delay (passive vs estimate)        : %.1f ms\n", 1e3 * *m.delay_s);
    else
        std::printf("  delay (passive vs estimate)        : n/a\n");
    std::printf("  nRMSE (total vs estimate)          : %.2f %%\n", m.nrmse_total_pct);
    std::printf("  nMAE  (total vs estimate)          : %.2f %%\n", m.nmae_total_pct);
    if (m.nrmse_passive_hp_pct)
        std::printf("  nRMSE (passive vs high-passed est) : %.2f %%\n", *m.nrmse_passive_hp_pct);
    if (m.nmae_passive_hp_pct)
        std::printf("  nMAE  (passive vs high-passed est) : %.2f %%\n", *m.nmae_passive_hp_pct);
    std::printf("  band power omega_sw > %.3g Hz       : %.6e (rad/s)^2\n", cfg.hp_cutoff,
                m.band_power_omega_sw);
    std::printf("  phi_sw amplitude at %.3g Hz        : %.6e rad\n", cfg.sines.f_act,
                m.tone_phi_sw_f_act);
}

int run_simulate(const simulation::ScenarioConfig& cfg, const fs::path& outdir) {
    fs::create_directories(outdir);
    const auto trace = simulation::run_scenario(cfg);
    const fs::path csv = outdir / "trace.csv";
    simulation::persist_trace(trace, csv);
    std::cout << csv.string() << "\n";
    std::cout << simulation::sidecar_path(csv).string() << "\n";
    if (trace.diverged) {
        std::cerr << "error: scenario diverged at step " << trace.diverged_at_step << ": "
                  << trace.diagnostic << "\n";
        return kExitRuntime;
    }
    try {
        print_summary(simulation::summarize(trace, cfg), cfg);
    } catch (const AnalysisError&) {
        std::printf("metrics: n/a (warmup leaves no samples; trace still written)\n");
    }
    return kExitOk;
}

int run_bode_cmd(const simulation::ScenarioConfig& cfg, const fs::path& outdir) {
    if (cfg.drive != simulation::DriveKind::chirp)
        throw ConfigError("bode needs a chirp-bearing config (drive.kind = chirp)");
    fs::create_directories(outdir);
    const auto table = simulation::run_bode(cfg);

    const char* filter_name = cfg.filter == simulation::FilterKind::ekf ? "ekf" : "kf";
    const fs::path csv = outdir / (std::string("bode_") + filter_name + ".csv");
    std::ofstream out(csv);
    if (!out) throw IoError("cannot open for writing: " + csv.string());
    out << "freq_hz,magnitude_db,phase_deg,coherence\n";
    char buf[128];
    for (const auto& p : table) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", p.freq_hz, p.magnitude_db,
                      p.phase_deg, p.coherence);
        out << buf;
    }
    out.close();
    std::cout << csv.string() << "\n";

    std::printf("phase at 7 Hz: %.2f deg\n", analysis::phase_at(table, 7.0));
    // scan well-identified bins only; leakage bins beyond the sweep have
    // near-zero coherence
    double edge = 0.0;
    bool found = false;
    for (const auto& p : table) {
        if (p.coherence < 0.8) continue;
        edge = p.freq_hz;
        if (p.freq_hz > 0.5 && p.magnitude_db < -3.0) {
            found = true;
            break;
        }
    }
    if (found)
        std::printf("usable bandwidth (-3 dB edge): %.2f Hz\n", edge);
    else
        std::printf("usable bandwidth: no -3 dB crossing below %.2f Hz\n", edge);
    return kExitOk;
}

int run_observability(const simulation::ScenarioConfig& cfg) {
    const auto aug = dynamics::augmented_linear_matrices(cfg.hw);
    const auto report = numerics::observability(Eigen::MatrixXd(aug.a), Eigen::MatrixXd(aug.c));
    std::printf("observability of the augmented linear system (5 states):\n");
    std::printf("  rank            : %ld\n", static_cast<long>(report.rank));
    std::printf("  singular values :");
    for (double s : report.singular_values) std::printf(" %.6e", s);
    std::printf("\n");
    std::printf("  2-norm condition: %.6e\n", report.condition_2norm);
    return kExitOk;
}

int run_metrics(const simulation::ScenarioConfig& cfg) {
    const auto trace = simulation::run_scenario(cfg);
    if (trace.diverged) {
        std::cerr << "error: scenario diverged at step " << trace.diverged_at_step << ": "
                  << trace.diagnostic << "\n";
        return kExitRuntime;
    }
    try {
        print_summary(simulation::summarize(trace, cfg), cfg);
    } catch (const AnalysisError& e) {
        std::cerr << "config error: " << e.what()
                  << " (sim.warmup must leave room within sim.duration)\n";
        return kExitUsage;
    }
    return kExitOk;
}

int run_sweep(const simulation::ScenarioConfig& base, const fs::path& outdir,
              const std::string& key, const std::vector<std::string>& values) {
    if (values.empty()) throw ConfigError("sweep needs a non-empty values list");
    fs::create_directories(outdir);

    struct RunOutcome {
        std::string value;
        bool ok = false;
        std::string error;
        simulation::MetricSummary metrics;
        fs::path trace_path;
    };

    std::vector<std::future<RunOutcome>> futures;
    for (const auto& value : values) {
        futures.push_back(std::async(std::launch::async, [&, value]() {
            RunOutcome r;
            r.value = value;
            try {
                auto cfg = simulation::apply_overrides(base, {{key, value}});
                const auto trace = simulation::run_scenario(cfg);
                std::string tag = key + "_" + value;
                for (auto& ch : tag)
                    if (ch == '.' || ch == '/' || ch == ',') ch = '_';
                r.trace_path = outdir / ("trace_" + tag + ".csv");
                simulation::persist_trace(trace, r.trace_path);
                if (trace.diverged) {
                    r.error = trace.diagnostic;
                    return r;
                }
                r.metrics = simulation::summarize(trace, cfg);
                r.ok = true;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            return r;
        }));
    }

    const fs::path csv = outdir / "sweep_summary.csv";
    std::ofstream out(csv);
    if (!out) throw IoError("cannot open for writing: " + csv.string());
    out << "key,value,status,delay_ms,nrmse_total_pct,nmae_total_pct,band_power_omega_sw,"
           "tone_phi_sw\n";
    bool any_failed = false;
    char buf[256];
    for (auto& f : futures) {
        const RunOutcome r = f.get();
        if (!r.trace_path.empty()) std::cout << r.trace_path.string() << "\n";
        if (r.ok) {
            std::snprintf(buf, sizeof(buf), "%s,%s,ok,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          key.c_str(), r.value.c_str(),
                          r.metrics.delay_s ? 1e3 * *r.metrics.delay_s : -1.0,
                          r.metrics.nrmse_total_pct, r.metrics.nmae_total_pct,
                          r.metrics.band_power_omega_sw, r.metrics.tone_phi_sw_f_act);
            out << buf;
        } else {
            any_failed = true;
            out << key << "," << r.value << ",failed,,,,,\n";
            std::cerr << "run " << key << "=" << r.value << " failed: " << r.error << "\n";
        }
    }
    out.close();
    std::cout << csv.string() << "\n";
    return any_failed ? kExitRuntime : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steer-by-wire hand-wheel disturbance observer toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string outdir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string sweep_key;
    std::vector<std::string> sweep_values;

    auto add_common = [&](CLI::App* cmd, bool with_out) {
        cmd->add_option("-c,--config", config_path, "scenario config file")->required();
        cmd->add_option("--override", overrides, "key=value config override (repeatable)");
        cmd->add_option("--seed", seed, "seed override");
        if (with_out) cmd->add_option("-o,--out", outdir, "output directory");
    };

    auto* simulate = app.add_subcommand("simulate", "run one scenario, write trace + metrics");
    add_common(simulate, true);
    auto* bode = app.add_subcommand("bode", "chirp transfer-function identification");
    add_common(bode, true);
    auto* obs = app.add_subcommand("observability", "rank/conditioning of the augmented system");
    add_common(obs, false);
    auto* metrics = app.add_subcommand("metrics", "run a scenario, print the metric summary only");
    add_common(metrics, false);
    auto* sweep = app.add_subcommand("sweep", "run one scenario per value of a config key");
    add_common(sweep, true);
    sweep->add_option("--key", sweep_key, "config key to sweep")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto cfg = load_config(config_path, overrides, seed);
        if (simulate->parsed()) return run_simulate(cfg, outdir);
        if (bode->parsed()) return run_bode_cmd(cfg, outdir);
        if (obs->parsed()) return run_observability(cfg);
        if (metrics->parsed()) return run_metrics(cfg);
        if (sweep->parsed()) return run_sweep(cfg, outdir, sweep_key, sweep_values);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParamError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

#include "sbw/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sbw/estimation.hpp"
#include "sbw/numerics.hpp"

namespace sbw::simulation {

using dynamics::AugState;
using dynamics::HwState;
using dynamics::Input;

const char* const kTraceHeader =
    "t,phi_sw,omega_sw,phi_m,omega_m,z_phi_m,z_omega_m,"
    "xh_phi_sw,xh_omega_sw,xh_phi_m,xh_omega_m,xh_t_d,"
    "t_d_active,t_d_passive,t_d_total,t_d_hat_hp,t_m,innov_phi_m,innov_omega_m";

namespace {

struct DriveSample {
    double active, passive, total;
};

DriveSample sample_drive(const ScenarioConfig& cfg, double t) {
    if (cfg.drive == DriveKind::chirp) {
        const double v = signals::chirp(cfg.chirp, t);
        return {0.0, v, v};
    }
    const auto d = signals::driver_torque(cfg.sines, t);
    return {d.active, d.passive, d.total};
}

TraceRow make_row(double t, const HwState& x, const Eigen::Vector2d& z,
                  const estimation::Vector& xh, const DriveSample& td, double tdhp, double tm,
                  const Eigen::Vector2d& innov) {
    TraceRow r;
    r.t = t;
    r.phi_sw = x[0];
    r.omega_sw = x[1];
    r.phi_m = x[2];
    r.omega_m = x[3];
    r.z_phi_m = z[0];
    r.z_omega_m = z[1];
    r.xh_phi_sw = xh[0];
    r.xh_omega_sw = xh[1];
    r.xh_phi_m = xh[2];
    r.xh_omega_m = xh[3];
    r.xh_t_d = xh[4];
    r.t_d_active = td.active;
    r.t_d_passive = td.passive;
    r.t_d_total = td.total;
    r.t_d_hat_hp = tdhp;
    r.t_m = tm;
    r.innov_phi_m = innov[0];
    r.innov_omega_m = innov[1];
    return r;
}

}  // namespace

SimTrace run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();

    const double ts = cfg.sample_time;
    const std::size_t steps = cfg.step_count();

    const auto lin = dynamics::linear_matrices(cfg.hw.linear);
    const auto [a_d4, b_d4] =
        estimation::discretize(Eigen::MatrixXd(lin.a), Eigen::MatrixXd(lin.b), ts);
    const auto aug = dynamics::augmented_linear_matrices(cfg.hw);
    const auto kf_model = estimation::make_kf_model(aug, ts);

    signals::GaussianNoise noise_stream(cfg.seed);
    const double v_std1 = std::sqrt(cfg.noise.r(0, 0));
    const double v_std2 = std::sqrt(cfg.noise.r(1, 1));
    Eigen::Vector4d w_std;
    for (int i = 0; i < 4; ++i) w_std[i] = std::sqrt(cfg.noise.q(i, i));

    signals::IirHighPass hp(cfg.hp_cutoff, ts, cfg.hp_order);

    SimTrace trace;
    trace.seed = cfg.seed;
    trace.config_hash = config_hash(cfg);
    trace.config_echo = canonical_text(cfg);
    trace.rows.reserve(steps + 1);

    HwState x = HwState::Zero();
    auto belief = estimation::FilterBelief::initial(5);

    auto draw_measurement = [&](const HwState& xs) {
        Eigen::Vector2d z = dynamics::measure(xs);
        z[0] += v_std1 * noise_stream.next();
        z[1] += v_std2 * noise_stream.next();
        return z;
    };

    Eigen::Vector2d z = draw_measurement(x);
    DriveSample td = sample_drive(cfg, 0.0);
    double tdhp = hp.apply(belief.x_hat[4]);
    double tm = control::motor_torque(cfg.impedance, z, tdhp);
    trace.rows.push_back(make_row(0.0, x, z, belief.x_hat, td, tdhp, tm, Eigen::Vector2d::Zero()));

    for (std::size_t k = 0; k < steps; ++k) {
        const double t_next = static_cast<double>(k + 1) * ts;
        const Input u_true(td.total, tm);

        if (cfg.model == ModelKind::linear) {
            x = a_d4 * x + b_d4 * u_true;
        } else {
            x = numerics::rk4_step(
                [&](const HwState& xs, const Input& us) {
                    return dynamics::nonlinear_dynamics(cfg.hw, xs, us);
                },
                x, u_true, ts);
        }
        if (cfg.process_noise) {
            for (int i = 0; i < 4; ++i) x[i] += w_std[i] * noise_stream.next();
        }
        if (!x.allFinite()) {
            trace.diverged = true;
            trace.diverged_at_step = k + 1;
            trace.diagnostic = "truth state became non-finite at t = " + format_double(t_next);
            return trace;
        }

        z = draw_measurement(x);

        Eigen::Vector2d innov = Eigen::Vector2d::Zero();
        if (cfg.filter != FilterKind::none) {
            const estimation::Vector u_filter =
                (estimation::Vector(2) << belief.x_hat[4], tm).finished();
            try {
                if (cfg.filter == FilterKind::kf) {
                    const auto prior = estimation::kf_predict(kf_model, belief, u_filter, cfg.noise);
                    auto res = estimation::kf_correct(kf_model, prior, z, cfg.noise);
                    belief = std::move(res.belief);
                    innov = res.innovation;
                } else {
                    auto res = estimation::ekf_step(cfg.hw, belief, Input(u_filter[0], u_filter[1]),
                                                    z, ts, cfg.noise);
                    belief = std::move(res.belief);
                    innov = res.innovation;
                }
            } catch (const FilterDegenerateError& e) {
                trace.diverged = true;
                trace.diverged_at_step = k + 1;
                trace.diagnostic = e.what();
                return trace;
            }
            if (!belief.x_hat.allFinite() || !belief.p.allFinite()) {
                trace.diverged = true;
                trace.diverged_at_step = k + 1;
                trace.diagnostic = "filter state became non-finite at t = " + format_double(t_next);
                return trace;
            }
        }

        tdhp = hp.apply(belief.x_hat[4]);
        td = sample_drive(cfg, t_next);
        tm = control::motor_torque(cfg.impedance, z, tdhp);
        trace.rows.push_back(make_row(t_next, x, z, belief.x_hat, td, tdhp, tm, innov));
    }
    return trace;
}

std::vector<analysis::BodePoint> run_bode(const ScenarioConfig& cfg) {
    if (cfg.drive != DriveKind::chirp)
        throw ParamError("run_bode: config must use drive.kind = chirp");
    if (cfg.filter == FilterKind::none)
        throw ParamError("run_bode: identification needs a filter (kf or ekf)");
    const SimTrace trace = run_scenario(cfg);
    if (trace.diverged) throw FilterDegenerateError("run_bode: scenario diverged: " + trace.diagnostic);

    const std::size_t start = static_cast<std::size_t>(std::ceil(cfg.warmup / cfg.sample_time - 1e-9));
    if (start >= trace.rows.size())
        throw AnalysisError("run_bode: warmup swallows the whole trace");

    std::vector<double> input, output;
    input.reserve(trace.rows.size() - start);
    output.reserve(trace.rows.size() - start);
    for (std::size_t i = start; i < trace.rows.size(); ++i) {
        input.push_back(trace.rows[i].t_d_total);
        output.push_back(trace.rows[i].xh_t_d);
    }
    return analysis::tf_estimate(input, output, cfg.welch_config());
}

MetricSummary summarize(const SimTrace& trace, const ScenarioConfig& cfg) {
    const std::size_t start = static_cast<std::size_t>(std::ceil(cfg.warmup / cfg.sample_time - 1e-9));
    if (trace.rows.size() <= start + 1)
        throw AnalysisError("summarize: no samples after warmup");

    const std::size_t n = trace.rows.size() - start;
    std::vector<double> td_pas(n), td_tot(n), xh_td(n), td_hp(n), omega_sw(n), phi_sw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TraceRow& r = trace.rows[start + i];
        td_pas[i] = r.t_d_passive;
        td_tot[i] = r.t_d_total;
        xh_td[i] = r.xh_t_d;
        td_hp[i] = r.t_d_hat_hp;
        omega_sw[i] = r.omega_sw;
        phi_sw[i] = r.phi_sw;
    }

    MetricSummary m;
    try {
        m.delay_s = analysis::estimate_delay(td_pas, xh_td, cfg.sample_time);
    } catch (const AnalysisError&) {
        m.delay_s.reset();
    }
    m.nrmse_total_pct = analysis::normalized_rmse(td_tot, xh_td);
    m.nmae_total_pct = analysis::normalized_mae(td_tot, xh_td);
    try {
        m.nrmse_passive_hp_pct = analysis::normalized_rmse(td_pas, td_hp);
        m.nmae_passive_hp_pct = analysis::normalized_mae(td_pas, td_hp);
    } catch (const AnalysisError&) {
        m.nrmse_passive_hp_pct.reset();
        m.nmae_passive_hp_pct.reset();
    }

    analysis::WelchConfig wc = cfg.welch_config();
    wc.segment = std::min<std::size_t>(wc.segment, n);
    if (wc.segment >= 8) {
        m.band_power_omega_sw =
            analysis::band_power(omega_sw, cfg.hp_cutoff, 0.5 / cfg.sample_time, wc);
    }
    m.tone_phi_sw_f_act =
        analysis::tone_amplitude(phi_sw, cfg.sines.f_act, 1.0 / cfg.sample_time);
    return m;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".meta");
    return p;
}

void persist_trace(const SimTrace& trace, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot open for writing: " + csv_path.string());
    out << kTraceHeader << "\n";
    char buf[48];
    auto field = [&](double v, char sep) {
        std::snprintf(buf, sizeof(buf), "%.17g%c", v, sep);
        out << buf;
    };
    for (const TraceRow& r : trace.rows) {
        field(r.t, ',');
        field(r.phi_sw, ',');
        field(r.omega_sw, ',');
        field(r.phi_m, ',');
        field(r.omega_m, ',');
        field(r.z_phi_m, ',');
        field(r.z_omega_m, ',');
        field(r.xh_phi_sw, ',');
        field(r.xh_omega_sw, ',');
        field(r.xh_phi_m, ',');
        field(r.xh_omega_m, ',');
        field(r.xh_t_d, ',');
        field(r.t_d_active, ',');
        field(r.t_d_passive, ',');
        field(r.t_d_total, ',');
        field(r.t_d_hat_hp, ',');
        field(r.t_m, ',');
        field(r.innov_phi_m, ',');
        field(r.innov_omega_m, '\n');
    }
    if (!out) throw IoError("write failed: " + csv_path.string());
    out.close();

    const auto meta = sidecar_path(csv_path);
    std::ofstream ms(meta);
    if (!ms) throw IoError("cannot open for writing: " + meta.string());
    ms << trace.config_echo;
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(trace.config_hash));
    ms << "meta.config_hash = " << hex << "\n";
    ms << "meta.rows = " << trace.rows.size() << "\n";
    ms << "meta.diverged = " << (trace.diverged ? "true" : "false") << "\n";
    if (trace.diverged) ms << "meta.diagnostic = " << trace.diagnostic << "\n";
    if (!ms) throw IoError("write failed: " + meta.string());
}

std::vector<TraceRow> load_trace_csv(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open trace: " + csv_path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty trace file: " + csv_path.string());
    if (line != kTraceHeader)
        throw IoError("unexpected trace header in " + csv_path.string());

    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double v[19];
        std::size_t pos = 0;
        for (int i = 0; i < 19; ++i) {
            const std::size_t next = line.find(',', pos);
            const std::string tok =
                line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            try {
                v[i] = std::stod(tok);
            } catch (const std::exception&) {
                throw IoError("bad numeric field in " + csv_path.string());
            }
            if (next == std::string::npos && i != 18)
                throw IoError("short row in " + csv_path.string());
            pos = next + 1;
        }
        TraceRow r{v[0], v[1],  v[2],  v[3],  v[4],  v[5],  v[6],  v[7],  v[8], v[9],
                   v[10], v[11], v[12], v[13], v[14], v[15], v[16], v[17], v[18]};
        rows.push_back(r);
    }
    return rows;
}

}  // namespace sbw::simulation

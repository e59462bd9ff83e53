#include "sbw/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sbw::simulation {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not a number: '" + value + "'", 0, key);
    }
    if (pos != value.size())
        throw ConfigError("trailing characters in value of '" + key + "': '" + value + "'", 0, key);
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not an unsigned integer: '" + value + "'", 0,
                          key);
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    throw ConfigError("value of '" + key + "' is not a boolean: '" + value + "'", 0, key);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value,
                                      std::size_t expected) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.size() != expected)
        throw ConfigError("'" + key + "' expects " + std::to_string(expected) + " values", 0, key);
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += format_double(values[i]);
    }
    return out;
}

const char* to_string(ModelKind m) { return m == ModelKind::linear ? "linear" : "nonlinear"; }
const char* to_string(FilterKind f) {
    switch (f) {
        case FilterKind::kf: return "kf";
        case FilterKind::ekf: return "ekf";
        default: return "none";
    }
}
const char* to_string(DriveKind d) { return d == DriveKind::sines ? "sines" : "chirp"; }

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ScenarioConfig::validate() const {
    if (!(sample_time > 0.0)) throw ParamError("ScenarioConfig: sample time must be > 0");
    if (!(duration >= sample_time))
        throw ParamError("ScenarioConfig: duration must be >= sample time");
    if (warmup < 0.0) throw ParamError("ScenarioConfig: warmup must be >= 0");
    hw.validate();
    impedance.validate();
    noise.validate();
    if (noise.q.rows() != 5 || noise.r.rows() != 2)
        throw ParamError("ScenarioConfig: Q must be 5x5 and R 2x2");
    sines.validate();
    if (drive == DriveKind::chirp) chirp.validate(sample_time);
    if (!(hp_cutoff > 0.0 && hp_cutoff < 0.5 / sample_time))
        throw ParamError("ScenarioConfig: high-pass cutoff must lie in (0, Nyquist)");
    if (hp_order < 1) throw ParamError("ScenarioConfig: high-pass order must be >= 1");
    if (welch_segment < 8) throw ParamError("ScenarioConfig: welch segment must be >= 8");
    if (!(welch_overlap >= 0.0 && welch_overlap < 1.0))
        throw ParamError("ScenarioConfig: welch overlap must lie in [0, 1)");
}

std::size_t ScenarioConfig::step_count() const {
    return static_cast<std::size_t>(std::floor(duration / sample_time + 1e-9));
}

analysis::WelchConfig ScenarioConfig::welch_config() const {
    return analysis::WelchConfig{welch_segment, welch_overlap, 1.0 / sample_time};
}

std::map<std::string, std::string> to_key_values(const ScenarioConfig& c) {
    std::map<std::string, std::string> kv;
    kv["sim.sample_time"] = format_double(c.sample_time);
    kv["sim.duration"] = format_double(c.duration);
    kv["sim.warmup"] = format_double(c.warmup);
    kv["sim.model"] = to_string(c.model);
    kv["sim.filter"] = to_string(c.filter);
    kv["sim.rejection"] = c.rejection ? "true" : "false";
    kv["sim.process_noise"] = c.process_noise ? "true" : "false";
    kv["sim.seed"] = std::to_string(c.seed);

    kv["drive.kind"] = to_string(c.drive);
    kv["drive.f_act"] = format_double(c.sines.f_act);
    kv["drive.a_act"] = format_double(c.sines.a_act);
    kv["drive.phase_act"] = format_double(c.sines.phase_act);
    kv["drive.f_pas"] = format_double(c.sines.f_pas);
    kv["drive.a_pas"] = format_double(c.sines.a_pas);
    kv["drive.phase_pas"] = format_double(c.sines.phase_pas);

    kv["chirp.f0"] = format_double(c.chirp.f0);
    kv["chirp.f1"] = format_double(c.chirp.f1);
    kv["chirp.duration"] = format_double(c.chirp.duration);
    kv["chirp.amplitude"] = format_double(c.chirp.amplitude);

    kv["hw.j_sw"] = format_double(c.hw.linear.j_sw);
    kv["hw.j_m"] = format_double(c.hw.linear.j_m);
    kv["hw.d_sw"] = format_double(c.hw.linear.d_sw);
    kv["hw.d_m"] = format_double(c.hw.linear.d_m);
    kv["hw.c_g"] = format_double(c.hw.linear.c_g);
    kv["hw.d_g"] = format_double(c.hw.linear.d_g);

    kv["stribeck_sw.d_v"] = format_double(c.hw.stribeck_sw.d_v);
    kv["stribeck_sw.d_s"] = format_double(c.hw.stribeck_sw.d_s);
    kv["stribeck_sw.d_k"] = format_double(c.hw.stribeck_sw.d_k);
    kv["stribeck_sw.omega_c"] = format_double(c.hw.stribeck_sw.omega_c);
    kv["stribeck_sw.delta"] = format_double(c.hw.stribeck_sw.delta);
    kv["stribeck_m.d_v"] = format_double(c.hw.stribeck_m.d_v);
    kv["stribeck_m.d_s"] = format_double(c.hw.stribeck_m.d_s);
    kv["stribeck_m.d_k"] = format_double(c.hw.stribeck_m.d_k);
    kv["stribeck_m.omega_c"] = format_double(c.hw.stribeck_m.omega_c);
    kv["stribeck_m.delta"] = format_double(c.hw.stribeck_m.delta);

    kv["gear.c_g1"] = format_double(c.hw.gear.c_g1);
    kv["gear.c_g2"] = format_double(c.hw.gear.c_g2);
    kv["gear.alpha"] = format_double(c.hw.gear.alpha);
    kv["gear.d_g1"] = format_double(c.hw.gear.d_g1);
    kv["gear.d_g2"] = format_double(c.hw.gear.d_g2);
    kv["gear.beta"] = format_double(c.hw.gear.beta);

    kv["pt1.time_constant"] = format_double(c.hw.pt1.time_constant);
    kv["pt1.gain"] = format_double(c.hw.pt1.gain);

    std::vector<double> qd(5), rd(2);
    for (int i = 0; i < 5; ++i) qd[i] = c.noise.q(i, i);
    for (int i = 0; i < 2; ++i) rd[i] = c.noise.r(i, i);
    kv["noise.q_diag"] = join(qd);
    kv["noise.r_diag"] = join(rd);

    kv["control.c_ref"] = format_double(c.impedance.c_ref);
    kv["control.d_ref"] = format_double(c.impedance.d_ref);
    kv["control.k_rej"] = format_double(c.impedance.k_rej);

    kv["hp.f_cut"] = format_double(c.hp_cutoff);
    kv["hp.order"] = std::to_string(c.hp_order);

    kv["welch.segment"] = std::to_string(c.welch_segment);
    kv["welch.overlap"] = format_double(c.welch_overlap);
    return kv;
}

ScenarioConfig from_key_values(const std::map<std::string, std::string>& kv) {
    ScenarioConfig c;
    const auto known = to_key_values(c);
    for (const auto& [key, value] : kv) {
        if (key.rfind("meta.", 0) == 0) continue;  // sidecar metadata, not config
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'", 0, key);
        (void)value;
    }
    auto get = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        return it != kv.end() ? it->second : known.at(key);
    };
    auto getd = [&](const char* key) { return parse_double(key, get(key)); };

    c.sample_time = getd("sim.sample_time");
    c.duration = getd("sim.duration");
    c.warmup = getd("sim.warmup");
    {
        const std::string& m = get("sim.model");
        if (m == "linear") c.model = ModelKind::linear;
        else if (m == "nonlinear") c.model = ModelKind::nonlinear;
        else throw ConfigError("sim.model must be linear|nonlinear, got '" + m + "'", 0, "sim.model");
    }
    {
        const std::string& f = get("sim.filter");
        if (f == "kf") c.filter = FilterKind::kf;
        else if (f == "ekf") c.filter = FilterKind::ekf;
        else if (f == "none") c.filter = FilterKind::none;
        else throw ConfigError("sim.filter must be kf|ekf|none, got '" + f + "'", 0, "sim.filter");
    }
    c.rejection = parse_bool("sim.rejection", get("sim.rejection"));
    c.process_noise = parse_bool("sim.process_noise", get("sim.process_noise"));
    c.seed = parse_u64("sim.seed", get("sim.seed"));

    {
        const std::string& d = get("drive.kind");
        if (d == "sines") c.drive = DriveKind::sines;
        else if (d == "chirp") c.drive = DriveKind::chirp;
        else throw ConfigError("drive.kind must be sines|chirp, got '" + d + "'", 0, "drive.kind");
    }
    c.sines.f_act = getd("drive.f_act");
    c.sines.a_act = getd("drive.a_act");
    c.sines.phase_act = getd("drive.phase_act");
    c.sines.f_pas = getd("drive.f_pas");
    c.sines.a_pas = getd("drive.a_pas");
    c.sines.phase_pas = getd("drive.phase_pas");

    c.chirp.f0 = getd("chirp.f0");
    c.chirp.f1 = getd("chirp.f1");
    c.chirp.duration = getd("chirp.duration");
    c.chirp.amplitude = getd("chirp.amplitude");

    c.hw.linear.j_sw = getd("hw.j_sw");
    c.hw.linear.j_m = getd("hw.j_m");
    c.hw.linear.d_sw = getd("hw.d_sw");
    c.hw.linear.d_m = getd("hw.d_m");
    c.hw.linear.c_g = getd("hw.c_g");
    c.hw.linear.d_g = getd("hw.d_g");

    c.hw.stribeck_sw.d_v = getd("stribeck_sw.d_v");
    c.hw.stribeck_sw.d_s = getd("stribeck_sw.d_s");
    c.hw.stribeck_sw.d_k = getd("stribeck_sw.d_k");
    c.hw.stribeck_sw.omega_c = getd("stribeck_sw.omega_c");
    c.hw.stribeck_sw.delta = getd("stribeck_sw.delta");
    c.hw.stribeck_m.d_v = getd("stribeck_m.d_v");
    c.hw.stribeck_m.d_s = getd("stribeck_m.d_s");
    c.hw.stribeck_m.d_k = getd("stribeck_m.d_k");
    c.hw.stribeck_m.omega_c = getd("stribeck_m.omega_c");
    c.hw.stribeck_m.delta = getd("stribeck_m.delta");

    c.hw.gear.c_g1 = getd("gear.c_g1");
    c.hw.gear.c_g2 = getd("gear.c_g2");
    c.hw.gear.alpha = getd("gear.alpha");
    c.hw.gear.d_g1 = getd("gear.d_g1");
    c.hw.gear.d_g2 = getd("gear.d_g2");
    c.hw.gear.beta = getd("gear.beta");

    c.hw.pt1.time_constant = getd("pt1.time_constant");
    c.hw.pt1.gain = getd("pt1.gain");

    const auto qd = parse_double_list("noise.q_diag", get("noise.q_diag"), 5);
    const auto rd = parse_double_list("noise.r_diag", get("noise.r_diag"), 2);
    c.noise.q = estimation::Matrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i) c.noise.q(i, i) = qd[i];
    c.noise.r = estimation::Matrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i) c.noise.r(i, i) = rd[i];

    c.impedance.c_ref = getd("control.c_ref");
    c.impedance.d_ref = getd("control.d_ref");
    c.impedance.k_rej = getd("control.k_rej");
    c.impedance.rejection_enabled = c.rejection;

    c.hp_cutoff = getd("hp.f_cut");
    c.hp_order = static_cast<int>(parse_u64("hp.order", get("hp.order")));

    c.welch_segment = static_cast<std::size_t>(parse_u64("welch.segment", get("welch.segment")));
    c.welch_overlap = getd("welch.overlap");

    c.validate();
    return c;
}

ScenarioConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'",
                              line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key", line_no);
        if (kv.count(key))
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'",
                              line_no, key);
        kv[key] = value;
    }
    return from_key_values(kv);
}

ScenarioConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ScenarioConfig apply_overrides(
    const ScenarioConfig& cfg,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
    auto kv = to_key_values(cfg);
    for (const auto& [key, value] : overrides) {
        if (!kv.count(key)) throw ConfigError("unknown override key '" + key + "'", 0, key);
        kv[key] = value;
    }
    return from_key_values(kv);
}

std::string canonical_text(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& [key, value] : to_key_values(cfg)) {
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    }
    return out;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
    std::string text;
    for (const auto& [key, value] : to_key_values(cfg)) {
        if (key == "sim.seed") continue;
        text += key;
        text += " = ";
        text += value;
        text += "\n";
    }
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace sbw::simulation

#include "sicmag/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

extern char** environ;

namespace sicmag {

using nlohmann::json;
using std::numbers::pi;

PhysicalConstants ModelConfig::constants() const {
    PhysicalConstants c;
    c.g_e = g_e;
    return c;
}

RelaxationParams ModelConfig::relaxation() const {
    const bool times = t1_s.has_value() || t2_s.has_value();
    const bool rates = alpha_per_s.has_value() || beta_per_s.has_value();
    if (times && rates)
        throw ConfigError("model: give either (t1_s, t2_s) or (alpha_per_s, beta_per_s), not both");
    if (times) {
        if (!t1_s || !t2_s) throw ConfigError("model: t1_s and t2_s must be given together");
        return alpha_beta_from_times(*t1_s, *t2_s);
    }
    if (rates) {
        if (!alpha_per_s || !beta_per_s)
            throw ConfigError("model: alpha_per_s and beta_per_s must be given together");
        if (*alpha_per_s < 0.0 || *beta_per_s < 0.0)
            throw ConfigError("model: alpha/beta must be >= 0");
        return {*alpha_per_s, *beta_per_s};
    }
    return {0.0, 0.0};
}

double ModelConfig::lorentzian_hwhm_hz() const {
    return t2_star_s > 0.0 ? 1.0 / (2.0 * pi * t2_star_s) : 0.0;
}

uint64_t RunConfig::seed_or_throw() const {
    if (!seed) throw ConfigError("seed: mandatory for any stochastic run");
    return *seed;
}

void RunConfig::validate() const {
    if (model.d_hz <= 0.0) throw ConfigError("model.d_hz: must be > 0");
    if (model.g_e <= 0.0) throw ConfigError("model.g_e: must be > 0");
    (void)model.relaxation();
    if (model.t2_star_s < 0.0) throw ConfigError("model.t2_star_s: must be >= 0");
    try {
        LevelScheme scheme;
        rates.validate(scheme);
        emission.validate();
        detector.validate();
        SweepPlan p = plan;
        p.kind = kind;
        if (p.f_drive_hz == 0.0) p.f_drive_hz = 2.0 * model.d_hz;  // placeholder for validation
        if (p.gamma_hz_per_t == 0.0) p.gamma_hz_per_t = model.constants().gamma_hz_per_t();
        p.validate();
        ensemble.validate();
        evolution.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (noise.shots < 1) throw ConfigError("noise.shots: must be >= 1");
    if (threads < 1) throw ConfigError("threads: must be >= 1");
    const bool stochastic = noise.poisson || ensemble.sampling == SamplingMode::random;
    if (stochastic && !seed) throw ConfigError("seed: mandatory for any stochastic run");
}

namespace {

const json* find(const json& doc, const char* key) {
    auto it = doc.find(key);
    return it == doc.end() ? nullptr : &*it;
}

double get_number(const json& doc, const char* section, const char* key, double fallback) {
    const json* v = find(doc, key);
    if (!v) return fallback;
    if (!v->is_number())
        throw ConfigError(std::string(section) + "." + key + ": expected a number");
    return v->get<double>();
}

bool get_bool(const json& doc, const char* section, const char* key, bool fallback) {
    const json* v = find(doc, key);
    if (!v) return fallback;
    if (!v->is_boolean())
        throw ConfigError(std::string(section) + "." + key + ": expected a boolean");
    return v->get<bool>();
}

std::string get_string(const json& doc, const char* section, const char* key,
                       const std::string& fallback) {
    const json* v = find(doc, key);
    if (!v) return fallback;
    if (!v->is_string())
        throw ConfigError(std::string(section) + "." + key + ": expected a string");
    return v->get<std::string>();
}

std::vector<double> parse_sweep(const json& p) {
    const json* sw = find(p, "sweep");
    if (!sw) throw ConfigError("protocol.sweep: required");
    std::vector<double> out;
    if (sw->is_array()) {
        for (const auto& v : *sw) {
            if (!v.is_number()) throw ConfigError("protocol.sweep: expected numbers");
            out.push_back(v.get<double>());
        }
    } else if (sw->is_object()) {
        const double start = get_number(*sw, "protocol.sweep", "start", NAN);
        const double stop = get_number(*sw, "protocol.sweep", "stop", NAN);
        const double n = get_number(*sw, "protocol.sweep", "n", 0.0);
        if (!std::isfinite(start) || !std::isfinite(stop) || n < 2)
            throw ConfigError("protocol.sweep: start, stop and n >= 2 required");
        const int count = static_cast<int>(n);
        for (int i = 0; i < count; ++i)
            out.push_back(start + (stop - start) * i / (count - 1));
    } else {
        throw ConfigError("protocol.sweep: expected a list or {start, stop, n}");
    }
    return out;
}

ModelConfig parse_model(const json& doc) {
    ModelConfig m;
    const json* sec = find(doc, "model");
    if (!sec) return m;
    m.d_hz = get_number(*sec, "model", "d_hz", m.d_hz);
    m.g_e = get_number(*sec, "model", "g_e", m.g_e);
    m.b0_t = get_number(*sec, "model", "b0_t", m.b0_t);
    m.t2_star_s = get_number(*sec, "model", "t2_star_s", 0.0);
    if (find(*sec, "t1_s")) m.t1_s = get_number(*sec, "model", "t1_s", 0.0);
    if (find(*sec, "t2_s")) m.t2_s = get_number(*sec, "model", "t2_s", 0.0);
    if (find(*sec, "alpha_per_s")) m.alpha_per_s = get_number(*sec, "model", "alpha_per_s", 0.0);
    if (find(*sec, "beta_per_s")) m.beta_per_s = get_number(*sec, "model", "beta_per_s", 0.0);
    if (find(*sec, "b0_transverse_t"))
        throw ConfigError("model.b0_transverse_t: B0 is restricted to the symmetry axis");
    return m;
}

RateSet parse_rates(const json& doc) {
    RateSet r = RateSet::v2_default();
    const json* sec = find(doc, "rates");
    if (!sec) return r;
    r.nominal_power_w = get_number(*sec, "rates", "nominal_power_w", r.nominal_power_w);
    const json* entries = find(*sec, "entries");
    if (entries) {
        if (!entries->is_array()) throw ConfigError("rates.entries: expected a list");
        r.entries.clear();
        for (const auto& e : *entries) {
            RateEntry entry;
            entry.from = static_cast<int>(get_number(e, "rates.entries", "from", -1));
            entry.to = static_cast<int>(get_number(e, "rates.entries", "to", -1));
            entry.rate_per_s = get_number(e, "rates.entries", "rate_per_s", -1.0);
            entry.laser_dependent = get_bool(e, "rates.entries", "laser_dependent", false);
            r.entries.push_back(entry);
        }
    }
    return r;
}

EmissionModel parse_emission(const json& doc) {
    EmissionModel em = EmissionModel::from_radiative_rate(1.6e8);
    const json* sec = find(doc, "emission");
    if (!sec) return em;
    const std::string mode = get_string(*sec, "emission", "mode", "rate_model");
    if (mode == "rate_model") {
        em = EmissionModel::from_radiative_rate(
            get_number(*sec, "emission", "radiative_cps", 1.6e8));
    } else if (mode == "phenomenological") {
        em.mode = EmissionModel::Mode::phenomenological;
        em.level_rates_cps.clear();
        em.r0_cps = get_number(*sec, "emission", "r0_cps", 1e6);
        em.contrast_c = get_number(*sec, "emission", "contrast_c", 0.006);
    } else {
        throw ConfigError("emission.mode: expected rate_model or phenomenological");
    }
    return em;
}

DetectorConfig parse_detector(const json& doc) {
    DetectorConfig d;
    const json* sec = find(doc, "detector");
    if (!sec) return d;
    d.collection_efficiency =
        get_number(*sec, "detector", "collection_efficiency", d.collection_efficiency);
    d.responsivity_a_per_w =
        get_number(*sec, "detector", "responsivity_a_per_w", d.responsivity_a_per_w);
    d.tia_gain_v_per_a = get_number(*sec, "detector", "tia_gain_v_per_a", d.tia_gain_v_per_a);
    d.bandwidth_hz = get_number(*sec, "detector", "bandwidth_hz", d.bandwidth_hz);
    d.sample_rate_hz = get_number(*sec, "detector", "sample_rate_hz", d.sample_rate_hz);
    d.dark_rate_cps = get_number(*sec, "detector", "dark_rate_cps", d.dark_rate_cps);
    d.wavelength_m = get_number(*sec, "detector", "wavelength_m", d.wavelength_m);
    return d;
}

EnsembleSpec parse_ensemble(const json& doc, const ModelConfig& model) {
    EnsembleSpec e;
    if (model.t2_star_s > 0.0) {
        e.detuning.kind = DetuningDistribution::Kind::lorentzian;
        e.detuning.hwhm_hz = model.lorentzian_hwhm_hz();
        e.n = 64;
    }
    const json* sec = find(doc, "ensemble");
    if (!sec) return e;
    e.n = static_cast<int>(get_number(*sec, "ensemble", "n", e.n));
    const std::string mode = get_string(*sec, "ensemble", "sampling", "quadrature");
    if (mode == "quadrature")
        e.sampling = SamplingMode::quadrature;
    else if (mode == "random")
        e.sampling = SamplingMode::random;
    else
        throw ConfigError("ensemble.sampling: expected quadrature or random");
    const double b1hw = get_number(*sec, "ensemble", "b1_half_width", 0.0);
    if (b1hw > 0.0) e.b1_scale = {B1ScaleDistribution::Kind::uniform, b1hw};
    return e;
}

EvolutionSettings parse_evolution(const json& doc) {
    EvolutionSettings s;
    const json* sec = find(doc, "evolution");
    if (!sec) return s;
    const std::string method = get_string(*sec, "evolution", "method", "superop_exp");
    if (method == "superop_exp")
        s.method = Method::superop_exp;
    else if (method == "adaptive_rk")
        s.method = Method::adaptive_rk;
    else
        throw ConfigError("evolution.method: expected superop_exp or adaptive_rk");
    const std::string frame = get_string(*sec, "evolution", "frame", "rotating");
    if (frame == "rotating")
        s.frame = Frame::rotating;
    else if (frame == "lab")
        s.frame = Frame::lab;
    else
        throw ConfigError("evolution.frame: expected rotating or lab");
    s.dt_max = get_number(*sec, "evolution", "dt_max_s", s.dt_max);
    s.rel_tol = get_number(*sec, "evolution", "rel_tol", s.rel_tol);
    s.abs_tol = get_number(*sec, "evolution", "abs_tol", s.abs_tol);
    return s;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    RunConfig c;
    c.model = parse_model(doc);
    c.rates = parse_rates(doc);
    c.emission = parse_emission(doc);
    c.detector = parse_detector(doc);

    const json* p = find(doc, "protocol");
    if (!p) throw ConfigError("protocol: required");
    c.kind = protocol_kind_from_string(get_string(*p, "protocol", "kind", ""));
    c.plan.kind = c.kind;
    c.plan.sweep = parse_sweep(*p);
    c.plan.t_init_s = get_number(*p, "protocol", "t_init_s", c.plan.t_init_s);
    c.plan.t_read_s = get_number(*p, "protocol", "t_read_s", c.plan.t_read_s);
    c.plan.laser_power_w = get_number(*p, "protocol", "laser_power_w", c.plan.laser_power_w);
    c.plan.b1_t = get_number(*p, "protocol", "b1_t", 0.0);
    c.plan.f_drive_hz = get_number(*p, "protocol", "f_drive_hz", 0.0);
    c.plan.detuning_hz = get_number(*p, "protocol", "detuning_hz", 0.0);
    c.plan.readout_offset_s = get_number(*p, "protocol", "readout_offset_s", 0.0);
    c.plan.readout_width_s = get_number(*p, "protocol", "readout_width_s", 2e-6);
    c.plan.pi_pulse_s = get_number(*p, "protocol", "pi_pulse_s", 0.0);
    const std::string phase = get_string(*p, "protocol", "final_phase", "x");
    if (phase == "x")
        c.plan.final_phase = PulsePhase::x;
    else if (phase == "y")
        c.plan.final_phase = PulsePhase::y;
    else
        throw ConfigError("protocol.final_phase: expected x or y");
    c.plan.gamma_hz_per_t = c.model.constants().gamma_hz_per_t();

    c.ensemble = parse_ensemble(doc, c.model);
    c.evolution = parse_evolution(doc);

    const json* noise = find(doc, "noise");
    if (noise) {
        c.noise.poisson = get_bool(*noise, "noise", "poisson", false);
        c.noise.shots = static_cast<int>(get_number(*noise, "noise", "shots", 1));
    }
    if (const json* v = find(doc, "seed")) {
        if (!v->is_number_integer() && !v->is_number_unsigned())
            throw ConfigError("seed: expected an integer");
        c.seed = v->get<uint64_t>();
    }
    if (const json* v = find(doc, "threads")) {
        if (!v->is_number()) throw ConfigError("threads: expected a number");
        c.threads = v->get<int>();
    }
    const json* out = find(doc, "output");
    if (out) {
        c.output.dir = get_string(*out, "output", "dir", c.output.dir);
        c.output.write_traces = get_bool(*out, "output", "write_traces", false);
    }
    c.validate();
    return c;
}

json to_json(const RunConfig& c) {
    json doc;
    json model;
    model["d_hz"] = c.model.d_hz;
    model["g_e"] = c.model.g_e;
    model["b0_t"] = c.model.b0_t;
    model["t2_star_s"] = c.model.t2_star_s;
    if (c.model.t1_s) model["t1_s"] = *c.model.t1_s;
    if (c.model.t2_s) model["t2_s"] = *c.model.t2_s;
    if (c.model.alpha_per_s) model["alpha_per_s"] = *c.model.alpha_per_s;
    if (c.model.beta_per_s) model["beta_per_s"] = *c.model.beta_per_s;
    doc["model"] = model;

    json rates;
    rates["nominal_power_w"] = c.rates.nominal_power_w;
    rates["entries"] = json::array();
    for (const RateEntry& e : c.rates.entries)
        rates["entries"].push_back({{"from", e.from},
                                    {"to", e.to},
                                    {"rate_per_s", e.rate_per_s},
                                    {"laser_dependent", e.laser_dependent}});
    doc["rates"] = rates;

    json emission;
    if (c.emission.mode == EmissionModel::Mode::rate_model) {
        emission["mode"] = "rate_model";
        double radiative = 0.0;
        for (double r : c.emission.level_rates_cps) radiative = std::max(radiative, r);
        emission["radiative_cps"] = radiative;
    } else {
        emission["mode"] = "phenomenological";
        emission["r0_cps"] = c.emission.r0_cps;
        emission["contrast_c"] = c.emission.contrast_c;
    }
    doc["emission"] = emission;

    doc["detector"] = {{"collection_efficiency", c.detector.collection_efficiency},
                       {"responsivity_a_per_w", c.detector.responsivity_a_per_w},
                       {"tia_gain_v_per_a", c.detector.tia_gain_v_per_a},
                       {"bandwidth_hz", c.detector.bandwidth_hz},
                       {"sample_rate_hz", c.detector.sample_rate_hz},
                       {"dark_rate_cps", c.detector.dark_rate_cps},
                       {"wavelength_m", c.detector.wavelength_m}};

    json protocol;
    protocol["kind"] = to_string(c.kind);
    protocol["sweep"] = c.plan.sweep;
    protocol["t_init_s"] = c.plan.t_init_s;
    protocol["t_read_s"] = c.plan.t_read_s;
    protocol["laser_power_w"] = c.plan.laser_power_w;
    protocol["b1_t"] = c.plan.b1_t;
    protocol["f_drive_hz"] = c.plan.f_drive_hz;
    protocol["detuning_hz"] = c.plan.detuning_hz;
    protocol["readout_offset_s"] = c.plan.readout_offset_s;
    protocol["readout_width_s"] = c.plan.readout_width_s;
    protocol["pi_pulse_s"] = c.plan.pi_pulse_s;
    protocol["final_phase"] = c.plan.final_phase == PulsePhase::x ? "x" : "y";
    doc["protocol"] = protocol;

    json ensemble;
    ensemble["n"] = c.ensemble.n;
    ensemble["sampling"] =
        c.ensemble.sampling == SamplingMode::quadrature ? "quadrature" : "random";
    if (c.ensemble.b1_scale.kind == B1ScaleDistribution::Kind::uniform)
        ensemble["b1_half_width"] = c.ensemble.b1_scale.half_width;
    doc["ensemble"] = ensemble;

    doc["evolution"] = {
        {"method", c.evolution.method == Method::superop_exp ? "superop_exp" : "adaptive_rk"},
        {"frame", c.evolution.frame == Frame::rotating ? "rotating" : "lab"},
        {"dt_max_s", c.evolution.dt_max},
        {"rel_tol", c.evolution.rel_tol},
        {"abs_tol", c.evolution.abs_tol}};
    doc["noise"] = {{"poisson", c.noise.poisson}, {"shots", c.noise.shots}};
    if (c.seed) doc["seed"] = *c.seed;
    doc["threads"] = c.threads;
    doc["output"] = {{"dir", c.output.dir}, {"write_traces", c.output.write_traces}};
    return doc;
}

void apply_env_overrides(nlohmann::json& doc, const char* prefix) {
    const std::string pre(prefix);
    for (char** env = environ; *env; ++env) {
        const std::string entry(*env);
        if (entry.rfind(pre, 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string key = entry.substr(pre.size(), eq - pre.size());
        const std::string value = entry.substr(eq + 1);

        // SECTION__FIELD -> /section/field JSON pointer
        std::string pointer;
        std::string segment;
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
        size_t pos = 0;
        while (pos <= key.size()) {
            const size_t sep = key.find("__", pos);
            const std::string part =
                key.substr(pos, sep == std::string::npos ? std::string::npos : sep - pos);
            pointer += "/" + part;
            if (sep == std::string::npos) break;
            pos = sep + 2;
        }
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::parse_error&) {
            parsed = value;  // plain string
        }
        doc[json::json_pointer(pointer)] = parsed;
    }
}

json load_json_file(const std::string& path, bool apply_env) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (apply_env) apply_env_overrides(doc);
    return doc;
}

RunConfig load_run_config(const std::string& path, bool apply_env) {
    return parse_run_config(load_json_file(path, apply_env));
}

}  // namespace sicmag

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "sicmag/config.hpp"
#include "sicmag/device.hpp"
#include "sicmag/fit.hpp"
#include "sicmag/manifest.hpp"
#include "sicmag/sensitivity.hpp"
#include "sicmag/simulate.hpp"
#include "sicmag/trace.hpp"

using namespace sicmag;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int cmd_simulate(const std::string& config_path, const std::string& out_override,
                 long long seed_override, int threads_override,
                 const std::string& frame_override) {
    RunConfig config = load_run_config(config_path);
    if (seed_override >= 0) config.seed = static_cast<uint64_t>(seed_override);
    if (threads_override > 0) config.threads = threads_override;
    if (!out_override.empty()) config.output.dir = out_override;
    if (!frame_override.empty()) {
        if (frame_override == "lab")
            config.evolution.frame = Frame::lab;
        else if (frame_override == "rotating")
            config.evolution.frame = Frame::rotating;
        else
            throw ConfigError("--frame: expected lab or rotating");
    }
    config.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult result = run_protocol(config);
    const std::vector<std::string> files =
        write_sweep_outputs(config, result, config.output.dir);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(config.output.dir, to_json(config), wall, files);

    std::cout << to_string(config.kind) << ": " << result.sweep.size() << " sweep points -> "
              << config.output.dir << "/sweep.csv\n";
    return kExitOk;
}

int cmd_fit(const std::string& model_name, const std::string& input_csv,
            const std::string& out_dir) {
    const FitModelKind kind = fit_model_from_string(model_name);
    const Trace trace = read_trace_csv(input_csv);
    const FitResult fit = fit_curve(kind, trace.x, trace.y);

    json report;
    report["model"] = to_string(kind);
    report["input"] = input_csv;
    report["converged"] = fit.converged;
    report["iterations"] = fit.iterations;
    report["residual_rms"] = fit.residual_rms;
    report["params"] = std::vector<double>(fit.params.data(),
                                           fit.params.data() + fit.params.size());
    report["sigmas"] = std::vector<double>(fit.sigmas.data(),
                                           fit.sigmas.data() + fit.sigmas.size());
    json derived;
    if (fit.converged) {
        if (kind == FitModelKind::lorentzian || kind == FitModelKind::double_lorentzian) {
            derived["fwhm"] = fwhm(fit);
            derived["center"] = kind == FitModelKind::lorentzian
                                    ? json(fit.params(2))
                                    : json({fit.params(2), fit.params(5)});
        }
        if (kind == FitModelKind::exp_decay || kind == FitModelKind::stretched_exp)
            derived["decay_time"] = fit.params(2);
        if (kind == FitModelKind::damped_cosine) {
            derived["frequency"] = fit.params(3);
            derived["decay_time"] = fit.params(2);
        }
    }
    report["derived"] = derived;

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream jf(out_dir + "/fit_report.json", std::ios::binary);
        jf << report.dump(2) << "\n";
    }
    {
        std::ofstream tf(out_dir + "/fit_report.txt", std::ios::binary);
        tf << "model:        " << to_string(kind) << "\n";
        tf << "input:        " << input_csv << "\n";
        tf << "converged:    " << (fit.converged ? "yes" : "no") << "\n";
        tf << "iterations:   " << fit.iterations << "\n";
        tf << "residual rms: " << format_double(fit.residual_rms) << "\n";
        for (int i = 0; i < fit.params.size(); ++i)
            tf << "p[" << i << "] = " << format_double(fit.params(i)) << " +- "
               << format_double(fit.sigmas(i)) << "\n";
        if (!derived.empty()) tf << "derived: " << derived.dump() << "\n";
    }
    std::cout << (fit.converged ? "converged" : "NOT converged") << ", residual rms "
              << format_double(fit.residual_rms) << " -> " << out_dir << "/fit_report.json\n";
    return kExitOk;
}

double need(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_number())
        throw ConfigError(std::string("sensitivity.") + key + ": required number");
    return doc[key].get<double>();
}

int cmd_sensitivity(const std::string& config_path, const std::string& out_csv) {
    json doc = load_json_file(config_path);
    const json sec = doc.contains("sensitivity") ? doc["sensitivity"] : doc;

    PhysicalConstants consts;
    if (sec.contains("g_e")) consts.g_e = sec["g_e"].get<double>();
    const double t_i = sec.value("t_init_s", 12e-6);
    const double t_r = sec.value("t_read_s", 12e-6);
    const double c = need(sec, "contrast");
    const double p = sec.value("stretch_p", 1.0);
    const int dms = sec.value("delta_ms", 1);

    std::vector<std::string> names;
    std::vector<double> etas, extras;
    if (sec.contains("linewidth_hz") && sec.contains("rate_cps")) {
        names.push_back("cw");
        etas.push_back(eta_cw(need(sec, "linewidth_hz"), c, need(sec, "rate_cps"), consts));
        extras.push_back(0.0);
    }
    if (sec.contains("counts") && sec.contains("t2_star_s")) {
        const double n = need(sec, "counts");
        const double t2s = need(sec, "t2_star_s");
        names.push_back("pulsed_odmr");
        etas.push_back(eta_pulsed(c, n, t2s, t_i, t_r, consts));
        extras.push_back(0.0);

        SensitivityInputs in;
        in.contrast = c;
        in.counts = sec.value("ramsey_counts", n);
        in.t2_star_s = t2s;
        in.t_init_s = t_i;
        in.t_read_s = t_r;
        in.stretch_p = p;
        in.delta_ms = dms;
        in.constants = consts;
        if (sec.contains("tau_s")) {
            const double tau = need(sec, "tau_s");
            names.push_back("ramsey");
            etas.push_back(eta_ramsey(c, in.counts, tau, t2s, p, dms, t_i, t_r, consts));
            extras.push_back(tau);
        } else {
            auto [tau_star, eta_star] = optimal_tau(in);
            names.push_back("ramsey");
            etas.push_back(eta_star);
            extras.push_back(tau_star);
        }
    }
    if (sec.contains("t2_s")) {
        const double n_echo = sec.value("echo_counts", sec.value("counts", 0.0));
        if (n_echo > 0.0) {
            auto [eta, f_opt] = eta_hahn_ac(c, n_echo, need(sec, "t2_s"), p, dms, t_i, t_r,
                                            consts, sec.value("half_period_convention", false));
            names.push_back("hahn_ac");
            etas.push_back(eta);
            extras.push_back(f_opt);
        }
    }
    if (names.empty())
        throw ConfigError("sensitivity: no calculator has a complete input set");

    std::printf("%-12s %14s %18s\n", "protocol", "eta_t_sqrthz", "eta_nt_sqrthz");
    for (size_t i = 0; i < names.size(); ++i) {
        std::printf("%-12s %14.6g %18.4f", names[i].c_str(), etas[i], etas[i] * 1e9);
        if (names[i] == "ramsey") std::printf("   (tau = %.4g s)", extras[i]);
        if (names[i] == "hahn_ac") std::printf("   (f_opt = %.4g Hz)", extras[i]);
        std::printf("\n");
    }
    if (!out_csv.empty()) {
        std::ofstream f(out_csv, std::ios::binary);
        f << "protocol,eta_t_per_sqrthz,extra\n";
        for (size_t i = 0; i < names.size(); ++i)
            f << names[i] << "," << format_double(etas[i]) << "," << format_double(extras[i])
              << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"V2 ensemble magnetometer simulator and analysis toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a protocol sweep from a config file");
    std::string sim_config, sim_out, sim_frame;
    long long sim_seed = -1;
    int sim_threads = 0;
    sim->add_option("--config", sim_config, "JSON run configuration")->required();
    sim->add_option("--seed", sim_seed, "override the RNG seed");
    sim->add_option("--out", sim_out, "override the output directory");
    sim->add_option("--threads", sim_threads, "worker threads");
    sim->add_option("--frame", sim_frame, "simulation frame: rotating|lab");

    // fit
    auto* fit = app.add_subcommand("fit", "fit a curve model to a trace CSV");
    std::string fit_model, fit_input, fit_out = ".";
    fit->add_option("--model", fit_model,
                    "lorentzian|double_lorentzian|exp_decay|damped_cosine|stretched_exp")
        ->required();
    fit->add_option("--input", fit_input, "trace CSV (x, y columns)")->required();
    fit->add_option("--out", fit_out, "report directory");

    // sensitivity
    auto* sens = app.add_subcommand("sensitivity", "shot-noise sensitivity table");
    std::string sens_config, sens_out;
    sens->add_option("--config", sens_config, "JSON file with a sensitivity section")
        ->required();
    sens->add_option("--out", sens_out, "also write the table as CSV");

    // device
    auto* dev = app.add_subcommand("device", "RF field and implantation calculators");
    dev->require_subcommand(1);
    auto* strip = dev->add_subcommand("microstrip", "sheet-conductor B1 field");
    double ms_current = 0.2, ms_width = 3e-3, ms_height = 3e-6, ms_x = 0.0, ms_freq = 70e6;
    strip->add_option("--current-a", ms_current);
    strip->add_option("--width-m", ms_width);
    strip->add_option("--height-m", ms_height);
    strip->add_option("--x-m", ms_x);
    strip->add_option("--frequency-hz", ms_freq);

    auto* coil = dev->add_subcommand("coil", "multi-turn coil center field");
    double coil_radius = 5e-3, coil_current = 0.1;
    int coil_turns = 10;
    coil->add_option("--turns", coil_turns);
    coil->add_option("--radius-m", coil_radius);
    coil->add_option("--current-a", coil_current);

    auto* range = dev->add_subcommand("range", "CSDA proton range");
    double range_energy = 400.0;
    std::string range_table;
    range->add_option("--energy-kev", range_energy);
    range->add_option("--table", range_table, "stopping-power CSV")->required();

    auto* prof = dev->add_subcommand("profile", "implantation vacancy depth profile");
    double prof_energy = 400.0, prof_straggle = 0.10, prof_dose = 1.0, prof_vpi = 60.0;
    std::string prof_table, prof_out = "profile.csv";
    prof->add_option("--energy-kev", prof_energy);
    prof->add_option("--table", prof_table)->required();
    prof->add_option("--straggle-frac", prof_straggle);
    prof->add_option("--dose", prof_dose, "ions per um^2");
    prof->add_option("--vacancies-per-ion", prof_vpi);
    prof->add_option("--out", prof_out);

    auto* count = dev->add_subcommand("count", "ensemble size from density and volume");
    double count_density = 350.0, count_volume = 0.0;
    count->add_option("--density-per-um3", count_density);
    count->add_option("--volume-um3", count_volume)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(sim_config, sim_out, sim_seed, sim_threads, sim_frame);
        if (fit->parsed()) return cmd_fit(fit_model, fit_input, fit_out);
        if (sens->parsed()) return cmd_sensitivity(sens_config, sens_out);
        if (dev->parsed()) {
            if (strip->parsed()) {
                MicrostripGeometry g;
                g.width_m = ms_width;
                g.current_a = ms_current;
                g.frequency_hz = ms_freq;
                const double b = microstrip_b1(g, ms_x, ms_height);
                std::printf("B1 = %.6g T (%.4f uT)\n", b, b * 1e6);
            } else if (coil->parsed()) {
                CoilGeometry g;
                g.turns = coil_turns;
                g.radius_m = coil_radius;
                g.current_a = coil_current;
                const double b = coil_b1_center(g);
                std::printf("B1 = %.6g T (%.4f uT)\n", b, b * 1e6);
            } else if (range->parsed()) {
                const StoppingTable table = StoppingTable::load_csv(range_table);
                const double r = csda_range_um(range_energy, table);
                std::printf("CSDA range(%.6g keV) = %.4f um\n", range_energy, r);
            } else if (prof->parsed()) {
                const StoppingTable table = StoppingTable::load_csv(prof_table);
                const ImplantProfile profile =
                    vacancy_profile(prof_energy, table, prof_straggle, prof_dose, prof_vpi);
                write_csv(prof_out, {"depth_um", "density_per_um"},
                          {profile.depth_um, profile.density_per_um});
                std::printf("peak depth %.4f um -> %s\n", profile.peak_depth_um,
                            prof_out.c_str());
            } else if (count->parsed()) {
                std::printf("count = %.6g\n", ensemble_count(count_density, count_volume));
            }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

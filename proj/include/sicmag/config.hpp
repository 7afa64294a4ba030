#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sicmag/constants.hpp"
#include "sicmag/ensemble.hpp"
#include "sicmag/levels.hpp"
#include "sicmag/lindblad.hpp"
#include "sicmag/protocol.hpp"
#include "sicmag/rates.hpp"
#include "sicmag/readout.hpp"

namespace sicmag {

// Invalid or inconsistent configuration; carries the offending field path.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ModelConfig {
    double d_hz = kDefaultZeroFieldSplittingHz;
    double g_e = PhysicalConstants{}.g_e;
    double b0_t = 0.0;
    // exactly one of the (T1, T2) / (alpha, beta) pairs may be given
    std::optional<double> t1_s, t2_s;
    std::optional<double> alpha_per_s, beta_per_s;
    double t2_star_s = 0.0;  // inhomogeneous dephasing; 0 disables broadening

    PhysicalConstants constants() const;
    RelaxationParams relaxation() const;
    double lorentzian_hwhm_hz() const;  // 1/(2 pi T2*), 0 when disabled
};

struct NoiseConfig {
    bool poisson = false;
    int shots = 1;  // readouts averaged into one data point
};

struct OutputConfig {
    std::string dir = "out";
    bool write_traces = false;
};

struct RunConfig {
    ModelConfig model;
    RateSet rates = RateSet::v2_default();
    EmissionModel emission = EmissionModel::from_radiative_rate(1.6e8);
    DetectorConfig detector;
    ProtocolKind kind = ProtocolKind::rabi;
    SweepPlan plan;  // f_drive_hz = 0 resolves to the upper resonance
    EnsembleSpec ensemble;
    EvolutionSettings evolution;
    NoiseConfig noise;
    std::optional<uint64_t> seed;
    int threads = 1;
    OutputConfig output;

    uint64_t seed_or_throw() const;
    void validate() const;
};

// Parse and validate; throws ConfigError naming the field on any problem.
RunConfig parse_run_config(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& config);

// Reads the file, applies SICMAG_* environment overrides (path segments
// joined by "__", e.g. SICMAG_MODEL__B0_T=250e-6), then parses.
RunConfig load_run_config(const std::string& path, bool apply_env = true);

nlohmann::json load_json_file(const std::string& path, bool apply_env = true);
void apply_env_overrides(nlohmann::json& doc, const char* prefix = "SICMAG_");

}  // namespace sicmag

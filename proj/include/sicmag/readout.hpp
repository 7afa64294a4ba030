#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sicmag/levels.hpp"
#include "sicmag/trace.hpp"

namespace sicmag {

struct DetectorConfig {
    double collection_efficiency = 0.01;
    double responsivity_a_per_w = 25.0;  // APD + internal gain, at 916 nm
    double tia_gain_v_per_a = 1e6;
    double bandwidth_hz = 100e3;  // one-pole low-pass corner
    double sample_rate_hz = 1e6;
    double dark_rate_cps = 0.0;
    double wavelength_m = 916e-9;  // fluorescence band for the photon-to-power conversion

    void validate() const;
    double volts_per_count_rate() const;  // photon rate -> TIA output volts
};

// Either a microscopic per-level emission rate model or the
// phenomenological r0 (1 + c s) form the sensitivity studies use.
struct EmissionModel {
    enum class Mode { rate_model, phenomenological };
    Mode mode = Mode::rate_model;
    std::vector<double> level_rates_cps;  // photons/s at unit population, per level
    double r0_cps = 0.0;
    double contrast_c = 0.0;

    void validate() const;

    // Emission at the radiative rate from every excited level.
    static EmissionModel from_radiative_rate(double radiative_cps,
                                             const LevelScheme& scheme = LevelScheme::hybrid10());
};

// Collected photon rate for a state: collection x sum(rate_i pop_i) + dark.
double fluorescence_rate(const Eigen::MatrixXcd& rho, const EmissionModel& em,
                         const DetectorConfig& det);

// Phenomenological rate for a spin signal s in [0, 1].
double fluorescence_rate_phenom(double spin_signal, const EmissionModel& em);

// Per-bin Poisson counts with mean rate*dt; deterministic per seed.
Trace poisson_readout(const Trace& rate_trace, double dt_s, uint64_t seed);

// counts/bin -> TIA volts through the one-pole detector response.
Trace detector_filter(const Trace& counts, const DetectorConfig& det);

struct LockinOutput {
    double x_v = 0.0;
    double y_v = 0.0;
    double r_v = 0.0;
    double theta_rad = 0.0;
};

enum class LockinReference { sine, square };

// Demodulation over an integer number of modulation periods; X uses the
// sine reference, Y the cosine. Throws when the trace spans less than one
// period.
LockinOutput lock_in(const Trace& voltage, double f_mod_hz,
                     LockinReference ref = LockinReference::sine);

// Signed contrast (resonant - off) / off.
double contrast(double signal_resonant, double signal_off);

}  // namespace sicmag

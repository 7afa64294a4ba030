#include "sicmag/readout.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sicmag/rng.hpp"

namespace sicmag {

using std::numbers::pi;

void DetectorConfig::validate() const {
    if (collection_efficiency < 0.0 || collection_efficiency > 1.0)
        throw std::invalid_argument("DetectorConfig: collection efficiency outside [0, 1]");
    if (responsivity_a_per_w < 0.0 || tia_gain_v_per_a < 0.0 || bandwidth_hz < 0.0 ||
        sample_rate_hz < 0.0 || dark_rate_cps < 0.0 || wavelength_m <= 0.0)
        throw std::invalid_argument("DetectorConfig: negative parameter");
    if (sample_rate_hz > 0.0 && bandwidth_hz > 0.0 && sample_rate_hz < 2.0 * bandwidth_hz)
        throw std::invalid_argument("DetectorConfig: sample rate below 2x bandwidth");
}

double DetectorConfig::volts_per_count_rate() const {
    const double photon_energy_j = 6.62607015e-34 * 2.99792458e8 / wavelength_m;
    return photon_energy_j * responsivity_a_per_w * tia_gain_v_per_a;
}

void EmissionModel::validate() const {
    for (double r : level_rates_cps)
        if (r < 0.0) throw std::invalid_argument("EmissionModel: negative emission rate");
    if (r0_cps < 0.0) throw std::invalid_argument("EmissionModel: negative r0");
    if (contrast_c < 0.0 || contrast_c >= 1.0)
        throw std::invalid_argument("EmissionModel: contrast must lie in [0, 1)");
}

EmissionModel EmissionModel::from_radiative_rate(double radiative_cps,
                                                 const LevelScheme& scheme) {
    EmissionModel em;
    em.mode = Mode::rate_model;
    em.level_rates_cps.assign(scheme.n_levels, 0.0);
    for (int e : scheme.excited) em.level_rates_cps[e] = radiative_cps;
    return em;
}

double fluorescence_rate(const Eigen::MatrixXcd& rho, const EmissionModel& em,
                         const DetectorConfig& det) {
    em.validate();
    if (static_cast<Eigen::Index>(em.level_rates_cps.size()) != rho.rows())
        throw std::invalid_argument("fluorescence_rate: emission rates do not match state size");
    double rate = 0.0;
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        rate += em.level_rates_cps[i] * rho(i, i).real();
    return det.collection_efficiency * rate + det.dark_rate_cps;
}

double fluorescence_rate_phenom(double spin_signal, const EmissionModel& em) {
    em.validate();
    if (spin_signal < 0.0 || spin_signal > 1.0)
        throw std::invalid_argument("fluorescence_rate_phenom: spin signal outside [0, 1]");
    return em.r0_cps * (1.0 + em.contrast_c * spin_signal);
}

Trace poisson_readout(const Trace& rate_trace, double dt_s, uint64_t seed) {
    rate_trace.validate();
    if (dt_s <= 0.0) throw std::invalid_argument("poisson_readout: dt must be > 0");
    Rng rng(seed);
    Trace counts;
    counts.x = rate_trace.x;
    counts.x_label = rate_trace.x_label;
    counts.y_label = "counts";
    counts.y.reserve(rate_trace.size());
    for (double r : rate_trace.y) {
        if (r < 0.0) throw std::invalid_argument("poisson_readout: negative rate");
        counts.y.push_back(static_cast<double>(rng.poisson(r * dt_s)));
    }
    return counts;
}

Trace detector_filter(const Trace& counts, const DetectorConfig& det) {
    counts.validate();
    det.validate();
    if (counts.size() < 2) throw std::invalid_argument("detector_filter: trace too short");
    const double dt = counts.x[1] - counts.x[0];
    for (size_t i = 1; i < counts.size(); ++i)
        if (std::abs((counts.x[i] - counts.x[i - 1]) - dt) > 1e-9 * dt)
            throw std::invalid_argument("detector_filter: trace must be uniformly sampled");

    const double conv = det.volts_per_count_rate();
    Trace v;
    v.x = counts.x;
    v.x_label = counts.x_label;
    v.y_label = "voltage_v";
    v.y.resize(counts.size());

    // one-pole low-pass; infinite bandwidth reduces to the identity
    const double a = det.bandwidth_hz > 0.0
                         ? 1.0 - std::exp(-2.0 * pi * det.bandwidth_hz * dt)
                         : 1.0;
    double state = counts.y.front() / dt * conv;
    for (size_t i = 0; i < counts.size(); ++i) {
        const double in = counts.y[i] / dt * conv;
        state += a * (in - state);
        v.y[i] = state;
    }
    return v;
}

LockinOutput lock_in(const Trace& voltage, double f_mod_hz, LockinReference ref) {
    voltage.validate();
    if (f_mod_hz <= 0.0) throw std::invalid_argument("lock_in: f_mod must be > 0");
    if (voltage.size() < 2) throw std::invalid_argument("lock_in: trace too short");
    const double dt = voltage.x[1] - voltage.x[0];
    const double span = voltage.size() * dt;
    const double period = 1.0 / f_mod_hz;
    const long n_periods = static_cast<long>(std::floor(span / period + 1e-9));
    if (n_periods < 1)
        throw std::invalid_argument("lock_in: trace spans less than one modulation period");

    const size_t n_used = static_cast<size_t>(std::llround(n_periods * period / dt));
    const double t0 = voltage.x.front();
    double acc_x = 0.0, acc_y = 0.0;
    for (size_t i = 0; i < n_used && i < voltage.size(); ++i) {
        const double phase = 2.0 * pi * f_mod_hz * (voltage.x[i] - t0);
        double rx, ry;
        if (ref == LockinReference::sine) {
            rx = std::sin(phase);
            ry = std::cos(phase);
        } else {
            rx = std::sin(phase) >= 0.0 ? 1.0 : -1.0;
            ry = std::cos(phase) >= 0.0 ? 1.0 : -1.0;
        }
        acc_x += voltage.y[i] * rx;
        acc_y += voltage.y[i] * ry;
    }
    const double norm = 2.0 / static_cast<double>(n_used);
    LockinOutput out;
    out.x_v = acc_x * norm;
    out.y_v = acc_y * norm;
    out.r_v = std::hypot(out.x_v, out.y_v);
    out.theta_rad = std::atan2(out.y_v, out.x_v);
    return out;
}

double contrast(double signal_resonant, double signal_off) {
    if (signal_off == 0.0) throw std::invalid_argument("contrast: reference signal is zero");
    return (signal_resonant - signal_off) / signal_off;
}

}  // namespace sicmag

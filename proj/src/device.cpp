#include "sicmag/device.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sicmag {

using std::numbers::pi;

void MicrostripGeometry::validate() const {
    if (width_m <= 0.0) throw std::invalid_argument("MicrostripGeometry: width must be > 0");
    if (thickness_m < 0.0)
        throw std::invalid_argument("MicrostripGeometry: thickness must be >= 0");
    if (frequency_hz < 0.0)
        throw std::invalid_argument("MicrostripGeometry: frequency must be >= 0");
}

double microstrip_b1(const MicrostripGeometry& g, double x_m, double h_m,
                     const PhysicalConstants& c) {
    g.validate();
    if (h_m <= 0.0) throw std::invalid_argument("microstrip_b1: height must be > 0");
    if (g.frequency_hz > 0.0) {
        const double wavelength = 2.99792458e8 / g.frequency_hz;
        const double extent = std::max({g.width_m, g.thickness_m, h_m, std::abs(x_m)});
        if (wavelength < 100.0 * extent)
            throw std::invalid_argument(
                "microstrip_b1: geometry too large for the quasi-static model at this frequency");
    }
    const double w = g.width_m;
    return c.mu_0 * g.current_a / (2.0 * pi * w) *
           (std::atan((w / 2.0 - x_m) / h_m) + std::atan((w / 2.0 + x_m) / h_m));
}

void CoilGeometry::validate() const {
    if (radius_m <= 0.0) throw std::invalid_argument("CoilGeometry: radius must be > 0");
    if (turns < 1) throw std::invalid_argument("CoilGeometry: turns must be >= 1");
}

double coil_b1_center(const CoilGeometry& g, const PhysicalConstants& c) {
    g.validate();
    return c.mu_0 * g.turns * g.current_a / (2.0 * g.radius_m);
}

void StoppingTable::validate() const {
    if (energy_kev.size() != stopping_kev_per_um.size() || energy_kev.size() < 2)
        throw std::invalid_argument("StoppingTable: need at least two (E, S) rows");
    for (size_t i = 0; i < energy_kev.size(); ++i) {
        if (stopping_kev_per_um[i] <= 0.0)
            throw std::invalid_argument("StoppingTable: stopping power must be > 0");
        if (i > 0 && energy_kev[i] <= energy_kev[i - 1])
            throw std::invalid_argument("StoppingTable: energies must be strictly increasing");
    }
    if (energy_kev.front() <= 0.0)
        throw std::invalid_argument("StoppingTable: energies must be > 0");
}

StoppingTable StoppingTable::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("StoppingTable: cannot open " + path);
    StoppingTable t;
    t.source = path;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            header_seen = true;  // mandatory header row
            continue;
        }
        std::stringstream ss(line);
        std::string e_field, s_field;
        if (!std::getline(ss, e_field, ',') || !std::getline(ss, s_field, ','))
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected two comma-separated columns");
        try {
            t.energy_kev.push_back(std::stod(e_field));
            t.stopping_kev_per_um.push_back(std::stod(s_field));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": not a number");
        }
    }
    if (!header_seen) throw std::runtime_error(path + ": empty stopping table");
    t.validate();
    return t;
}

namespace {

// velocity-proportional extrapolation below the table: S ~ sqrt(E)
double stopping_below_table(double e_kev, const StoppingTable& t) {
    return t.stopping_kev_per_um.front() * std::sqrt(e_kev / t.energy_kev.front());
}

double stopping_at(double e_kev, const StoppingTable& t) {
    if (e_kev <= t.energy_kev.front()) return stopping_below_table(e_kev, t);
    // log-log linear interpolation between grid points
    size_t hi = 1;
    while (hi < t.energy_kev.size() && t.energy_kev[hi] < e_kev) ++hi;
    const double e0 = t.energy_kev[hi - 1], e1 = t.energy_kev[hi];
    const double s0 = t.stopping_kev_per_um[hi - 1], s1 = t.stopping_kev_per_um[hi];
    const double f = (std::log(e_kev) - std::log(e0)) / (std::log(e1) - std::log(e0));
    return std::exp(std::log(s0) + f * (std::log(s1) - std::log(s0)));
}

}  // namespace

double csda_range_um(double e_kev, const StoppingTable& table) {
    table.validate();
    if (e_kev <= 0.0) throw std::invalid_argument("csda_range: energy must be > 0");
    if (e_kev > table.energy_kev.back())
        throw std::invalid_argument("csda_range: energy above the table span");

    // trapezoidal integral of 1/S on a fine uniform grid up to E
    const int n = 2000;
    const double de = e_kev / n;
    double acc = 0.0;
    double prev = 0.0;  // 1/S -> 0 as E -> 0 in the sqrt(E) regime
    for (int i = 1; i <= n; ++i) {
        const double e = i * de;
        const double cur = 1.0 / stopping_at(e, table);
        acc += 0.5 * (prev + cur) * de;
        prev = cur;
    }
    return acc;
}

ImplantProfile vacancy_profile(double e_kev, const StoppingTable& table, double straggle_frac,
                               double dose, double vacancies_per_ion) {
    if (straggle_frac <= 0.0 || straggle_frac >= 0.5)
        throw std::invalid_argument("vacancy_profile: straggle_frac must lie in (0, 0.5)");
    if (dose <= 0.0) throw std::invalid_argument("vacancy_profile: dose must be > 0");
    if (vacancies_per_ion < 0.0)
        throw std::invalid_argument("vacancy_profile: vacancies_per_ion must be >= 0");

    const double range = csda_range_um(e_kev, table);
    const double sigma = straggle_frac * range;

    ImplantProfile p;
    p.peak_depth_um = range;
    const int n = 600;
    const double z_max = range + 5.0 * sigma;
    p.depth_um.resize(n + 1);
    p.density_per_um.resize(n + 1);
    double mass = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double z = z_max * i / n;
        const double u = (z - range) / sigma;
        p.depth_um[i] = z;
        p.density_per_um[i] = std::exp(-0.5 * u * u);
    }
    const double dz = z_max / n;
    for (int i = 0; i <= n; ++i)
        mass += p.density_per_um[i] * ((i == 0 || i == n) ? 0.5 : 1.0) * dz;
    const double scale = dose * vacancies_per_ion / mass;
    for (double& v : p.density_per_um) v *= scale;
    return p;
}

double ensemble_count(double density_per_um3, double volume_um3) {
    if (density_per_um3 < 0.0 || volume_um3 < 0.0)
        throw std::invalid_argument("ensemble_count: inputs must be >= 0");
    return density_per_um3 * volume_um3;
}

}  // namespace sicmag

#pragma once

#include <string>
#include <vector>

#include "sicmag/constants.hpp"

namespace sicmag {

// Quasi-static sheet-conductor model of the RF microstrip. At the V2
// frequencies (~70 MHz) the wavelength is meters while the geometry is
// millimeters, so the closed form replaces a full FEM solve.
struct MicrostripGeometry {
    double width_m = 3e-3;
    double thickness_m = 3e-6;
    double current_a = 0.0;
    double frequency_hz = 70e6;

    void validate() const;
};

// In-plane field of a uniform surface current at lateral offset x and
// height h above the strip:
//   B = (mu0 I)/(2 pi w) [atan((w/2 - x)/h) + atan((w/2 + x)/h)]
double microstrip_b1(const MicrostripGeometry& g, double x_m, double h_m,
                     const PhysicalConstants& c = {});

struct CoilGeometry {
    double radius_m = 5e-3;
    int turns = 10;
    double current_a = 0.0;

    void validate() const;
};

// On-axis center field of the stacked-loop approximation: mu0 n I / (2 r).
double coil_b1_center(const CoilGeometry& g, const PhysicalConstants& c = {});

// Electronic stopping power of protons in 4H-SiC, (energy keV, S keV/um).
struct StoppingTable {
    std::vector<double> energy_kev;
    std::vector<double> stopping_kev_per_um;
    std::string source;

    void validate() const;
    // Two-column CSV, '#' comments, mandatory header.
    static StoppingTable load_csv(const std::string& path);
};

// CSDA range R(E) = integral_0^E dE'/S(E') by trapezoidal integration on
// the table grid, with log-log interpolation below the lowest tabulated
// point. Energies above the table span are rejected.
double csda_range_um(double e_kev, const StoppingTable& table);

// Gaussian depth profile of the implantation-generated vacancies: centered
// on the CSDA range, sigma = straggle_frac * range, normalized on the grid
// to dose * vacancies_per_ion.
struct ImplantProfile {
    std::vector<double> depth_um;
    std::vector<double> density_per_um;  // per unit area dose
    double peak_depth_um = 0.0;
};

ImplantProfile vacancy_profile(double e_kev, const StoppingTable& table, double straggle_frac,
                               double dose, double vacancies_per_ion);

// density (1/um^3) x volume (um^3)
double ensemble_count(double density_per_um3, double volume_um3);

}  // namespace sicmag

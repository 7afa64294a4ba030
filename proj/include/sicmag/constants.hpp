#pragma once

namespace sicmag {

// CODATA 2018 values. g_e defaults to the V2 ground-state value; the
// gyromagnetic ratio is always derived from it, never stored separately.
struct PhysicalConstants {
    double h = 6.62607015e-34;       // Planck constant, J s (exact)
    double hbar = 1.054571817e-34;   // reduced Planck constant, J s
    double mu_b = 9.2740100783e-24;  // Bohr magneton, J/T
    double g_e = 2.0028;             // Lande factor of the V2 ground state
    double mu_0 = 1.25663706212e-6;  // vacuum permeability, T m/A

    double gamma_hz_per_t() const { return g_e * mu_b / h; }
};

inline constexpr double kDefaultZeroFieldSplittingHz = 35e6;  // D, so 2D = 70 MHz

}  // namespace sicmag

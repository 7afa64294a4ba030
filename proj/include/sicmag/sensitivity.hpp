#pragma once

#include <utility>

#include "sicmag/constants.hpp"

namespace sicmag {

// Shot-noise-limited sensitivity calculators. The CW form uses h and the
// pulsed forms use hbar, exactly as the formulas are conventionally
// printed; the resulting 2 pi disparity between Eq.-level prefactors is
// intentional and not "corrected" here.
struct SensitivityInputs {
    double contrast = 0.0;     // C, fractional
    double rate_cps = 0.0;     // R, CW photon rate
    double counts = 0.0;       // N, counts per readout
    double linewidth_hz = 0.0; // FWHM
    double t2_star_s = 0.0;
    double t2_s = 0.0;
    double t_init_s = 12e-6;
    double t_read_s = 12e-6;
    double tau_s = 0.0;
    double stretch_p = 1.0;
    int delta_ms = 1;
    PhysicalConstants constants;
};

// eta = (4/(3 sqrt 3)) (h/(g_e mu_B)) dnu / (C sqrt R),  T/sqrt(Hz)
double eta_cw(double linewidth_hz, double contrast, double rate_cps,
              const PhysicalConstants& c = {});

// eta = (8/(3 sqrt 3)) (hbar/(g_e mu_B)) (1/(C sqrt N)) sqrt(tI + T2* + tR)/T2*
// T2* below 1 ns is rejected (the formula diverges).
double eta_pulsed(double contrast, double counts, double t2_star_s, double t_init_s,
                  double t_read_s, const PhysicalConstants& c = {});

// eta = (hbar/(dms g_e mu_B)) (1/(C e^{-(tau/T2*)^p} sqrt N)) sqrt(tI + tau + tR)/tau
double eta_ramsey(double contrast, double counts, double tau_s, double t2_star_s, double p,
                  int delta_ms, double t_init_s, double t_read_s,
                  const PhysicalConstants& c = {});

// AC variant: the Ramsey form with T2* -> T2 and tau = T2. The optimal AC
// frequency defaults to 1/T2 (periods close to tau); the 1/(2 tau)
// convention is available via half_period_convention.
std::pair<double, double> eta_hahn_ac(double contrast, double counts, double t2_s, double p,
                                      int delta_ms, double t_init_s, double t_read_s,
                                      const PhysicalConstants& c = {},
                                      bool half_period_convention = false);

// Golden-section minimum of eta_ramsey over tau in [T2*/100, 10 T2*],
// relative tolerance 1e-4.
std::pair<double, double> optimal_tau(const SensitivityInputs& in);

}  // namespace sicmag

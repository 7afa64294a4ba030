#include "sicmag/sensitivity.hpp"

#include <cmath>
#include <stdexcept>

namespace sicmag {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("sensitivity: ") + name +
                                                " must be > 0");
}

}  // namespace

double eta_cw(double linewidth_hz, double contrast, double rate_cps,
              const PhysicalConstants& c) {
    require_positive(linewidth_hz, "linewidth");
    require_positive(contrast, "contrast");
    require_positive(rate_cps, "photon rate");
    return 4.0 / (3.0 * std::sqrt(3.0)) * c.h / (c.g_e * c.mu_b) * linewidth_hz /
           (contrast * std::sqrt(rate_cps));
}

double eta_pulsed(double contrast, double counts, double t2_star_s, double t_init_s,
                  double t_read_s, const PhysicalConstants& c) {
    require_positive(contrast, "contrast");
    require_positive(counts, "counts");
    require_positive(t2_star_s, "T2*");
    require_positive(t_init_s, "t_init");
    require_positive(t_read_s, "t_read");
    if (t2_star_s < 1e-9)
        throw std::invalid_argument("sensitivity: T2* below 1 ns, formula diverges");
    return 8.0 / (3.0 * std::sqrt(3.0)) * c.hbar / (c.g_e * c.mu_b) /
           (contrast * std::sqrt(counts)) *
           std::sqrt(t_init_s + t2_star_s + t_read_s) / t2_star_s;
}

double eta_ramsey(double contrast, double counts, double tau_s, double t2_star_s, double p,
                  int delta_ms, double t_init_s, double t_read_s, const PhysicalConstants& c) {
    require_positive(contrast, "contrast");
    require_positive(counts, "counts");
    require_positive(tau_s, "tau");
    require_positive(t2_star_s, "T2*");
    require_positive(t_init_s, "t_init");
    require_positive(t_read_s, "t_read");
    if (p < 1.0) throw std::invalid_argument("sensitivity: stretch exponent p must be >= 1");
    if (delta_ms != 1 && delta_ms != 2)
        throw std::invalid_argument("sensitivity: delta_ms must be 1 or 2");
    const double envelope = std::exp(-std::pow(tau_s / t2_star_s, p));
    return c.hbar / (delta_ms * c.g_e * c.mu_b) / (contrast * envelope * std::sqrt(counts)) *
           std::sqrt(t_init_s + tau_s + t_read_s) / tau_s;
}

std::pair<double, double> eta_hahn_ac(double contrast, double counts, double t2_s, double p,
                                      int delta_ms, double t_init_s, double t_read_s,
                                      const PhysicalConstants& c, bool half_period_convention) {
    require_positive(t2_s, "T2");
    const double eta =
        eta_ramsey(contrast, counts, t2_s, t2_s, p, delta_ms, t_init_s, t_read_s, c);
    const double f_opt = half_period_convention ? 1.0 / (2.0 * t2_s) : 1.0 / t2_s;
    return {eta, f_opt};
}

std::pair<double, double> optimal_tau(const SensitivityInputs& in) {
    require_positive(in.t2_star_s, "T2*");
    auto eta = [&](double tau) {
        return eta_ramsey(in.contrast, in.counts, tau, in.t2_star_s, in.stretch_p, in.delta_ms,
                          in.t_init_s, in.t_read_s, in.constants);
    };
    double lo = in.t2_star_s / 100.0;
    double hi = 10.0 * in.t2_star_s;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = hi - gr * (hi - lo);
    double c2 = lo + gr * (hi - lo);
    double f1 = eta(c1), f2 = eta(c2);
    while ((hi - lo) > 1e-4 * (std::abs(lo) + std::abs(hi)) / 2.0) {
        if (f1 < f2) {
            hi = c2;
            c2 = c1;
            f2 = f1;
            c1 = hi - gr * (hi - lo);
            f1 = eta(c1);
        } else {
            lo = c1;
            c1 = c2;
            f1 = f2;
            c2 = lo + gr * (hi - lo);
            f2 = eta(c2);
        }
    }
    const double tau_star = (lo + hi) / 2.0;
    return {tau_star, eta(tau_star)};
}

}  // namespace sicmag

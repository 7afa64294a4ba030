#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace sicmag {

// Inhomogeneous broadening across the ensemble: a Lorentzian distribution
// of resonance detunings (HWHM gamma = 1/(2 pi T2*_inhom)) and a bounded
// uniform spread of the drive amplitude scale.
struct DetuningDistribution {
    enum class Kind { delta, lorentzian };
    Kind kind = Kind::delta;
    double hwhm_hz = 0.0;
};

struct B1ScaleDistribution {
    enum class Kind { delta, uniform };
    Kind kind = Kind::delta;
    double half_width = 0.0;  // fractional, e.g. 0.1 for +-10%
};

enum class SamplingMode { quadrature, random };

struct EnsembleSpec {
    DetuningDistribution detuning;
    B1ScaleDistribution b1_scale;
    int n = 1;  // per-dimension quadrature order, or total random draws
    SamplingMode sampling = SamplingMode::quadrature;

    void validate() const;
};

struct EnsembleMember {
    double detuning_hz = 0.0;
    double b1_scale = 1.0;
    double weight = 1.0;
};

// Deterministic member list. Quadrature uses midpoint nodes of the
// tan-substituted Lorentzian and Gauss-Legendre nodes for the uniform B1
// spread (tensor product when both are active); random mode draws n joint
// samples from streams derived from the seed.
std::vector<EnsembleMember> ensemble_members(const EnsembleSpec& spec, uint64_t seed);

// Pointwise weighted mean of per-member curves of equal length.
std::vector<double> ensemble_average(
    const std::function<std::vector<double>(const EnsembleMember&)>& run,
    const std::vector<EnsembleMember>& members);

// Gauss-Legendre nodes/weights on [-1, 1] via the Golub-Welsch eigenvalue
// method; exposed for tests.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace sicmag

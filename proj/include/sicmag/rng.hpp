#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sicmag {

// splitmix64; used to derive independent child seeds so results do not
// depend on worker scheduling.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Samplers are written out here instead of using std:: distributions, whose
// algorithms are implementation-defined; mt19937_64 itself is specified
// bit-exactly, so traces are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    double uniform01() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        // Box-Muller; one value per call keeps the stream position simple
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // Knuth product method below mean 50, rounded Gaussian above. The
    // Gaussian branch is exact to O(1/sqrt(mean)) in distribution shape,
    // ample for shot-noise synthesis at high count rates.
    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 50.0) {
            const double limit = std::exp(-mean);
            long k = 0;
            double prod = uniform01();
            while (prod > limit) {
                ++k;
                prod *= uniform01();
            }
            return k;
        }
        const double draw = mean + std::sqrt(mean) * normal();
        return draw < 0.0 ? 0 : std::lround(draw);
    }

    double cauchy(double hwhm) {
        // inverse CDF; tan argument strictly inside (-pi/2, pi/2)
        double u = uniform01();
        while (u == 0.0) u = uniform01();
        return hwhm * std::tan(3.141592653589793 * (u - 0.5));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace sicmag

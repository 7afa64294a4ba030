#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sicmag/ensemble.hpp"

using namespace sicmag;
using std::numbers::pi;

TEST_SUITE("ensemble") {

TEST_CASE("delta distributions reduce to a single unit-weight member") {
    EnsembleSpec spec;
    spec.n = 17;
    const auto members = ensemble_members(spec, 42);
    REQUIRE(members.size() == 1);
    CHECK(members[0].detuning_hz == 0.0);
    CHECK(members[0].b1_scale == 1.0);
    CHECK(members[0].weight == 1.0);

    const auto avg = ensemble_average(
        [](const EnsembleMember& m) {
            return std::vector<double>{3.0 + m.detuning_hz, m.b1_scale};
        },
        members);
    CHECK(avg[0] == 3.0);
    CHECK(avg[1] == 1.0);
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
    std::vector<double> x, w;
    gauss_legendre(5, x, w);
    double s0 = 0.0, s2 = 0.0, s8 = 0.0;
    for (int k = 0; k < 5; ++k) {
        s0 += w[k];
        s2 += w[k] * x[k] * x[k];
        s8 += w[k] * std::pow(x[k], 8.0);
    }
    CHECK(s0 == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(s8 == doctest::Approx(2.0 / 9.0).epsilon(1e-13));  // degree 8 < 2n
}

TEST_CASE("weights are normalized for every sampling mode") {
    EnsembleSpec spec;
    spec.detuning = {DetuningDistribution::Kind::lorentzian, 692e3};
    spec.b1_scale = {B1ScaleDistribution::Kind::uniform, 0.1};
    spec.n = 12;
    for (auto mode : {SamplingMode::quadrature, SamplingMode::random}) {
        spec.sampling = mode;
        const auto members = ensemble_members(spec, 7);
        double total = 0.0;
        for (const auto& m : members) total += m.weight;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("lorentzian detuning average reproduces the exponential free-induction envelope") {
    // E[cos(2 pi delta t)] = exp(-2 pi Gamma t): Fourier transform of the
    // Lorentzian; this is what limits Ramsey to T2* = 1/(2 pi Gamma)
    const double gamma_hwhm = 692e3;
    const double t2_star = 1.0 / (2.0 * pi * gamma_hwhm);
    CHECK(t2_star == doctest::Approx(230e-9).epsilon(0.01));

    EnsembleSpec spec;
    spec.detuning = {DetuningDistribution::Kind::lorentzian, gamma_hwhm};
    spec.sampling = SamplingMode::random;
    spec.n = 200000;
    const auto members = ensemble_members(spec, 2024);

    std::vector<double> taus;
    for (int i = 1; i <= 8; ++i) taus.push_back(i * 60e-9);
    const auto avg = ensemble_average(
        [&](const EnsembleMember& m) {
            std::vector<double> out;
            for (double tau : taus) out.push_back(std::cos(2.0 * pi * m.detuning_hz * tau));
            return out;
        },
        members);
    for (size_t i = 0; i < taus.size(); ++i) {
        const double expect = std::exp(-taus[i] / t2_star);
        CHECK(std::abs(avg[i] - expect) < 0.015);
    }
}

TEST_CASE("uniform B1 spread damps the averaged Rabi oscillation") {
    // oracle: direct average over n = 1e4 uniform draws of sin^2(pi f s tau)
    const double f = 1.017e6;
    const double half_width = 0.1;
    std::vector<double> taus = {2e-6, 5e-6, 10e-6};

    std::vector<double> oracle(taus.size(), 0.0);
    const int n_oracle = 10000;
    for (int k = 0; k < n_oracle; ++k) {
        const double s = 1.0 - half_width + 2.0 * half_width * (k + 0.5) / n_oracle;
        for (size_t i = 0; i < taus.size(); ++i) {
            const double v = std::sin(pi * f * s * taus[i]);
            oracle[i] += v * v / n_oracle;
        }
    }

    EnsembleSpec spec;
    spec.b1_scale = {B1ScaleDistribution::Kind::uniform, half_width};
    spec.n = 24;
    const auto members = ensemble_members(spec, 1);
    const auto avg = ensemble_average(
        [&](const EnsembleMember& m) {
            std::vector<double> out;
            for (double tau : taus) {
                const double v = std::sin(pi * f * m.b1_scale * tau);
                out.push_back(v * v);
            }
            return out;
        },
        members);

    for (size_t i = 0; i < taus.size(); ++i)
        CHECK(avg[i] == doctest::Approx(oracle[i]).epsilon(1e-3));

    // the averaged amplitude decays with tau; a single member's does not
    CHECK(std::abs(avg[2] - 0.5) < std::abs(avg[0] - 0.5));
}

TEST_CASE("random sampling is deterministic per seed") {
    EnsembleSpec spec;
    spec.detuning = {DetuningDistribution::Kind::lorentzian, 1e6};
    spec.sampling = SamplingMode::random;
    spec.n = 50;
    const auto a = ensemble_members(spec, 99);
    const auto b = ensemble_members(spec, 99);
    const auto c = ensemble_members(spec, 100);
    REQUIRE(a.size() == b.size());
    bool all_equal = true, any_diff = false;
    for (size_t i = 0; i < a.size(); ++i) {
        all_equal = all_equal && a[i].detuning_hz == b[i].detuning_hz;
        any_diff = any_diff || a[i].detuning_hz != c[i].detuning_hz;
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("invalid specs are rejected") {
    EnsembleSpec spec;
    spec.n = 0;
    CHECK_THROWS_AS((void)ensemble_members(spec, 1), std::invalid_argument);
    spec.n = 4;
    spec.detuning = {DetuningDistribution::Kind::lorentzian, -1.0};
    CHECK_THROWS_AS((void)ensemble_members(spec, 1), std::invalid_argument);
}

}  // TEST_SUITE

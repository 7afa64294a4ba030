#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "sicmag/constants.hpp"
#include "sicmag/spin.hpp"

using namespace sicmag;
using namespace std::complex_literals;

namespace {

HamiltonianParams default_params() {
    HamiltonianParams p;
    p.d_hz = 35e6;
    p.gamma_hz_per_t = PhysicalConstants{}.gamma_hz_per_t();
    return p;
}

}  // namespace

TEST_SUITE("spin") {

TEST_CASE("spin matrices match the standard spin-3/2 representation") {
    const SpinOperators s = spin_matrices();

    CHECK(s.sz(0, 0).real() == doctest::Approx(1.5));
    CHECK(s.sz(1, 1).real() == doctest::Approx(0.5));
    CHECK(s.sz(2, 2).real() == doctest::Approx(-0.5));
    CHECK(s.sz(3, 3).real() == doctest::Approx(-1.5));
    CHECK(std::abs(s.sx(0, 1) - std::sqrt(3.0) / 2.0) < 1e-14);

    CHECK((s.sx - s.sx.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((s.sy - s.sy.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((s.sz - s.sz.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

    // [Sx, Sy] = i Sz and cyclic permutations
    CHECK((s.sx * s.sy - s.sy * s.sx - 1.0i * s.sz).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((s.sy * s.sz - s.sz * s.sy - 1.0i * s.sx).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((s.sz * s.sx - s.sx * s.sz - 1.0i * s.sy).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ground hamiltonian eigenvalues and hermiticity") {
    HamiltonianParams p = default_params();

    SUBCASE("zero field gaps are 2D on both transitions") {
        const Eigen::Matrix4cd h = ground_hamiltonian(p, 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
        const auto ev = es.eigenvalues();
        // spectrum is (-D, -D, +D, +D): both gaps equal 2D = 70 MHz
        CHECK(ev(2) - ev(0) == doctest::Approx(70e6).epsilon(1e-12));
        CHECK(ev(3) - ev(1) == doctest::Approx(70e6).epsilon(1e-12));
    }

    SUBCASE("closed-form eigenvalues at B1 = 0") {
        p.b0_t = 430e-6;
        const Eigen::Matrix4cd h = ground_hamiltonian(p, 0.0);
        const double ms[4] = {1.5, 0.5, -0.5, -1.5};
        for (int k = 0; k < 4; ++k) {
            const double expected =
                p.d_hz * (ms[k] * ms[k] - 1.25) + p.gamma_hz_per_t * p.b0_t * ms[k];
            CHECK(std::abs(h(k, k).real() - expected) < 1e-12 * std::abs(expected));
        }
    }

    SUBCASE("random parameters give a Hermitian matrix") {
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int it = 0; it < 20; ++it) {
            p.b0_t = u(rng) * 1e-3;
            p.drive = DriveParams{u(rng) * 1e-3, 50e6 + u(rng) * 40e6, u(rng) * 6.28};
            const Eigen::Matrix4cd h = ground_hamiltonian(p, u(rng) * 1e-6);
            CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14 * h.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("resonance frequencies") {
    HamiltonianParams p = default_params();

    SUBCASE("zero field: both at 2D") {
        auto [lo, hi] = resonance_frequencies(p);
        CHECK(lo == doctest::Approx(70e6));
        CHECK(hi == doctest::Approx(70e6));
    }

    SUBCASE("250 uT splitting against the diagonalization oracle") {
        p.b0_t = 250e-6;
        auto [lo, hi] = resonance_frequencies(p);
        CHECK(lo == doctest::Approx(62.99e6).epsilon(2e-3));
        CHECK(hi == doctest::Approx(77.01e6).epsilon(2e-3));

        // oracle: numerically diagonalize the 4x4 and take the
        // |+-1/2> <-> |+-3/2| gaps (basis order +3/2,+1/2,-1/2,-3/2)
        const Eigen::Matrix4cd h = ground_hamiltonian(p, 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
        // B1 = 0: H is diagonal, eigenvalues in basis order are its diagonal
        const double f_plus = std::real(h(0, 0) - h(1, 1));
        const double f_minus = std::real(h(3, 3) - h(2, 2));
        CHECK(lo == doctest::Approx(std::min(f_plus, f_minus)).epsilon(1e-12));
        CHECK(hi == doctest::Approx(std::max(f_plus, f_minus)).epsilon(1e-12));
        CHECK(hi - lo == doctest::Approx(2 * p.gamma_hz_per_t * p.b0_t).epsilon(1e-12));
    }

    SUBCASE("splitting is linear in B0 with slope 2 gamma") {
        double prev = 0.0;
        for (double b : {100e-6, 200e-6, 300e-6}) {
            p.b0_t = b;
            auto [lo, hi] = resonance_frequencies(p);
            const double split = hi - lo;
            CHECK(split == doctest::Approx(2 * p.gamma_hz_per_t * b).epsilon(1e-12));
            CHECK(split > prev);
            prev = split;
        }
    }
}

TEST_CASE("rotating frame hamiltonian") {
    HamiltonianParams p = default_params();
    p.b0_t = 250e-6;

    SUBCASE("requires a drive") {
        CHECK_THROWS_AS((void)rotating_frame_hamiltonian(p, 70e6), std::invalid_argument);
    }

    SUBCASE("B1 = 0 leaves only detunings on the diagonal") {
        p.drive = DriveParams{0.0, 70e6, 0.0};
        const Eigen::Matrix4cd h = rotating_frame_hamiltonian(p, 70e6);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                if (a != b) CHECK(std::abs(h(a, b)) < 1e-12);
    }

    SUBCASE("detuning the frame shifts the target transition diagonal difference") {
        p.drive = DriveParams{10e-6, 70e6, 0.0};
        auto [f_minus, f_plus] = resonance_frequencies(p);
        const Eigen::Matrix4cd on = rotating_frame_hamiltonian(p, f_plus);
        const Eigen::Matrix4cd off = rotating_frame_hamiltonian(p, f_plus + 5e6);
        const double gap_on = std::real(on(0, 0) - on(1, 1));
        const double gap_off = std::real(off(0, 0) - off(1, 1));
        CHECK(gap_on == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(gap_off - gap_on == doctest::Approx(-5e6).epsilon(1e-9));
    }

    SUBCASE("resonant coupling element is (sqrt(3)/4) gamma B1 on the ladder") {
        p.drive = DriveParams{41.9e-6, 70e6, 0.0};
        auto [f_minus, f_plus] = resonance_frequencies(p);
        const Eigen::Matrix4cd h = rotating_frame_hamiltonian(p, f_plus);
        const double expect = std::sqrt(3.0) / 4.0 * p.gamma_hz_per_t * 41.9e-6;
        CHECK(std::abs(h(0, 1)) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("transition matrix element") {
    const Eigen::Vector4cd e32 = Eigen::Vector4cd::Unit(0);
    const Eigen::Vector4cd e12 = Eigen::Vector4cd::Unit(1);

    SUBCASE("z-oriented drive cannot connect distinct Sz eigenstates") {
        const auto p = transition_matrix_element(e12, e32, {0.0, 0.0, 5e-3});
        CHECK(std::abs(p) < 1e-15);
    }

    SUBCASE("x-oriented drive gives sqrt(3)/2 B1") {
        const double b1 = 3.3e-4;
        const auto p = transition_matrix_element(e12, e32, {b1, 0.0, 0.0});
        CHECK(std::abs(p) == doctest::Approx(std::sqrt(3.0) / 2.0 * b1).epsilon(1e-12));
    }

    SUBCASE("fixed magnitude is maximized perpendicular to the symmetry axis") {
        const double b1 = 1e-4;
        double best_perp = std::abs(transition_matrix_element(e12, e32, {b1, 0.0, 0.0}));
        for (double theta : {0.1, 0.4, 0.8, 1.2, 1.5}) {
            const Eigen::Vector3d v(b1 * std::sin(theta), 0.0, b1 * std::cos(theta));
            CHECK(std::abs(transition_matrix_element(e12, e32, v)) <= best_perp + 1e-15);
        }
    }

    SUBCASE("unnormalized states are rejected") {
        CHECK_THROWS_AS((void)transition_matrix_element(2.0 * e12, e32, {1e-4, 0.0, 0.0}),
                        std::invalid_argument);
    }
}

}  // TEST_SUITE

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "sicmag/constants.hpp"
#include "sicmag/fit.hpp"
#include "sicmag/lindblad.hpp"
#include "sicmag/spin.hpp"

using namespace sicmag;
using namespace std::complex_literals;

namespace {

const LevelScheme kScheme = LevelScheme::hybrid10();
const LevelScheme kGroundOnly{4, {0, 1, 2, 3}, {}, {}};

Matrix mixed_ground_state() {
    Matrix rho = Matrix::Zero(10, 10);
    for (int g : kScheme.ground) rho(g, g) = 0.25;
    return rho;
}

// random valid hybrid state: PSD coherent ground block + diagonal rest
Matrix random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::Matrix4cd g;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) g(a, b) = std::complex<double>(u(rng) - 0.5, u(rng) - 0.5);
    Eigen::Matrix4cd gg = g * g.adjoint();
    Matrix rho = Matrix::Zero(10, 10);
    const double w_ground = 0.6 + 0.4 * u(rng);
    rho.topLeftCorner<4, 4>() = w_ground * gg / gg.trace();
    double rest = 1.0 - w_ground;
    for (int i = 4; i < 10; ++i) {
        const double p = (i == 9) ? rest : rest * u(rng);
        rho(i, i) = p;
        rest -= p;
    }
    rho(9, 9) += rest;  // absorb rounding
    return rho;
}

std::vector<Matrix> default_ops(bool laser_on) {
    RateSet rates = RateSet::v2_default();
    auto ops = jump_operators(rates.active(laser_on ? rates.nominal_power_w : 0.0), 10);
    const RelaxationParams relax = alpha_beta_from_times(157e-6, 2.8e-6);
    auto [la, lb] = relaxation_operators(relax, kScheme);
    ops.push_back(la);
    ops.push_back(lb);
    return ops;
}

}  // namespace

TEST_SUITE("lindblad") {

TEST_CASE("jump operator construction") {
    CHECK(jump_operator(0, 4, 0.0).cwiseAbs().maxCoeff() == 0.0);

    const Matrix l = jump_operator(0, 4, 4.0);
    CHECK(l(0, 4).real() == doctest::Approx(2.0));
    CHECK(l.cwiseAbs().sum() == doctest::Approx(2.0));

    CHECK_THROWS_AS((void)jump_operator(3, 3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)jump_operator(0, 4, -1.0), std::invalid_argument);

    SUBCASE("dissipator of a single jump operator is traceless") {
        std::mt19937_64 rng(7);
        for (int it = 0; it < 10; ++it) {
            const Matrix rho = random_state(rng);
            const Matrix rhs = lindblad_rhs(rho, Matrix::Zero(10, 10),
                                            {jump_operator(2, 6, 3.7e6)});
            CHECK(std::abs(rhs.trace()) < 1e-12 * 3.7e6);
        }
    }
}

TEST_CASE("relaxation operators") {
    SUBCASE("alpha = beta = 0 gives zero operators") {
        auto [la, lb] = relaxation_operators({0.0, 0.0}, kScheme);
        CHECK(la.cwiseAbs().maxCoeff() == 0.0);
        CHECK(lb.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("Frobenius norms match sqrt(2 alpha) |Sx| and sqrt(2 beta) |Sz|") {
        const double alpha = 2123.0, beta = 3.54e5;
        auto [la, lb] = relaxation_operators({alpha, beta}, kScheme);
        const SpinOperators s = spin_matrices();
        CHECK(la.norm() == doctest::Approx(std::sqrt(2 * alpha) * s.sx.norm()).epsilon(1e-12));
        CHECK(lb.norm() == doctest::Approx(std::sqrt(2 * beta) * s.sz.norm()).epsilon(1e-12));
    }

    SUBCASE("excited and metastable rows/columns stay exactly zero") {
        auto [la, lb] = relaxation_operators({1e3, 1e5}, kScheme);
        for (int i = 4; i < 10; ++i) {
            CHECK(la.row(i).cwiseAbs().maxCoeff() == 0.0);
            CHECK(la.col(i).cwiseAbs().maxCoeff() == 0.0);
            CHECK(lb.row(i).cwiseAbs().maxCoeff() == 0.0);
            CHECK(lb.col(i).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("alpha and beta from measured times") {
    const RelaxationParams p = alpha_beta_from_times(157e-6, 2.8e-6);
    CHECK(p.alpha_per_s == doctest::Approx(2123.0).epsilon(0.01));
    CHECK(p.beta_per_s == doctest::Approx(3.54e5).epsilon(0.02));

    const RelaxationParams slow = alpha_beta_from_times(1e6, 1e6);
    CHECK(slow.alpha_per_s == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(slow.beta_per_s == doctest::Approx(0.0).epsilon(1e-5));

    // 1/T2 < (5/2) alpha: inconsistent pair
    CHECK_THROWS_AS((void)alpha_beta_from_times(1e-6, 10e-6), std::invalid_argument);
    CHECK_THROWS_AS((void)alpha_beta_from_times(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("lindblad rhs") {
    SUBCASE("zero hamiltonian and no operators") {
        std::mt19937_64 rng(3);
        const Matrix rho = random_state(rng);
        CHECK(lindblad_rhs(rho, Matrix::Zero(10, 10), {}).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("trace preservation for random inputs") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int it = 0; it < 10; ++it) {
            const Matrix rho = random_state(rng);
            Matrix h = Matrix::Zero(10, 10);
            for (int a = 0; a < 10; ++a)
                for (int b = a; b < 10; ++b) {
                    h(a, b) = std::complex<double>(u(rng) - 0.5, a == b ? 0.0 : u(rng) - 0.5) * 1e6;
                    h(b, a) = std::conj(h(a, b));
                }
            auto ops = default_ops(true);
            const Matrix rhs = lindblad_rhs(rho, h, ops);
            CHECK(std::abs(rhs.trace()) < 1e-12 * rhs.cwiseAbs().maxCoeff() * 10);
        }
    }

    SUBCASE("two-level pure decay matches the analytic rate") {
        const double rate = 2.5e6;
        Matrix rho = Matrix::Zero(10, 10);
        rho(4, 4) = 0.7;  // excited
        rho(0, 0) = 0.3;
        const Matrix rhs = lindblad_rhs(rho, Matrix::Zero(10, 10), {jump_operator(0, 4, rate)});
        CHECK(rhs(4, 4).real() == doctest::Approx(-rate * 0.7).epsilon(1e-12));
        CHECK(rhs(0, 0).real() == doctest::Approx(rate * 0.7).epsilon(1e-12));
    }

    CHECK_THROWS_AS((void)lindblad_rhs(Matrix::Zero(10, 10), Matrix::Zero(4, 4), {}),
                    std::invalid_argument);
}

TEST_CASE("propagate: identity without generator") {
    std::mt19937_64 rng(5);
    const Matrix rho = random_state(rng);
    SegmentGenerator gen;
    gen.h_hz = Matrix::Zero(10, 10);
    const StateTrace tr = propagate(rho, gen, 37e-6, EvolutionSettings{}, 4);
    CHECK((tr.rho.back() - rho).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("propagate: resonant RWA Rabi oscillation against the analytic oracle") {
    HamiltonianParams p;
    p.b0_t = 0.0;
    p.drive = DriveParams{41.888e-6, 70e6, 0.0};
    const double omega_r = std::sqrt(3.0) / 2.0 * p.gamma_hz_per_t * p.drive->b1_t;

    Eigen::Matrix4cd h4 = rotating_frame_hamiltonian(p, 70e6);
    // isolate the |+3/2>,|+1/2> pair: the two-level reduction of the oracle
    h4(1, 2) = h4(2, 1) = 0.0;
    h4(2, 3) = h4(3, 2) = 0.0;

    Matrix rho0 = Matrix::Zero(10, 10);
    rho0(1, 1) = 1.0;

    SegmentGenerator gen;
    gen.h_hz = embed_ground(h4, kScheme);
    const double duration = 10.0 / omega_r;
    const int n = 400;
    const StateTrace tr = propagate(rho0, gen, duration, EvolutionSettings{}, n);

    double max_err = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = tr.t_s[k];
        const double expect = std::sin(std::numbers::pi * omega_r * t);
        max_err = std::max(max_err,
                           std::abs(tr.rho[k](0, 0).real() - expect * expect));
    }
    CHECK(max_err < 1e-6);
}

TEST_CASE("propagate: trace drift under driven dissipative evolution stays below 1e-9") {
    HamiltonianParams p;
    p.drive = DriveParams{100e-6, 70e6, 0.0};
    SegmentGenerator gen;
    gen.h_hz = embed_ground(rotating_frame_hamiltonian(p, 70e6), kScheme);
    gen.jump_ops = default_ops(true);

    const StateTrace tr = propagate(mixed_ground_state(), gen, 100e-6, EvolutionSettings{}, 20);
    for (const Matrix& rho : tr.rho) CHECK(std::abs(rho.trace().real() - 1.0) < 1e-9);
}

TEST_CASE("propagate: adaptive integrator converges under dt_max refinement") {
    HamiltonianParams p;
    p.drive = DriveParams{50e-6, 70e6, 0.0};
    SegmentGenerator gen;
    gen.h_hz = embed_ground(rotating_frame_hamiltonian(p, 70e6), kScheme);
    gen.jump_ops = default_ops(false);

    EvolutionSettings s;
    s.method = Method::adaptive_rk;
    s.rel_tol = 1e-6;
    s.abs_tol = 1e-12;
    s.dt_max = 1e-7;
    const StateTrace a = propagate(mixed_ground_state(), gen, 5e-6, s, 1);
    s.dt_max = 5e-8;
    const StateTrace b = propagate(mixed_ground_state(), gen, 5e-6, s, 1);
    CHECK((a.rho.back() - b.rho.back()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("steady state") {
    SUBCASE("laser on, no RF: matches long-time propagation") {
        HamiltonianParams p;
        const Matrix h = embed_ground(ground_hamiltonian(p, 0.0), kScheme);
        const auto ops = default_ops(true);
        const Matrix ss = steady_state(h, ops);
        CHECK(std::abs(ss.trace().real() - 1.0) < 1e-9);

        SegmentGenerator gen;
        gen.h_hz = h;
        gen.jump_ops = ops;
        const double t_long = 50.0 * 3.0 * 157e-6;  // 50 T1
        const StateTrace tr = propagate(mixed_ground_state(), gen, t_long, EvolutionSettings{}, 1);
        CHECK((ss - tr.rho.back()).cwiseAbs().maxCoeff() < 1e-8);
    }

    SUBCASE("relaxation alone on the ground block gives the uniform state") {
        HamiltonianParams p;
        p.b0_t = 250e-6;
        const Eigen::Matrix4cd h4 = ground_hamiltonian(p, 0.0);
        const SpinOperators s = spin_matrices();
        const RelaxationParams relax = alpha_beta_from_times(157e-6, 2.8e-6);
        const Eigen::Matrix4cd la = std::sqrt(2.0 * relax.alpha_per_s) * s.sx;
        const Eigen::Matrix4cd lb = std::sqrt(2.0 * relax.beta_per_s) * s.sz;
        const Matrix ss = steady_state(h4, {la, lb});
        for (int i = 0; i < 4; ++i) CHECK(ss(i, i).real() == doctest::Approx(0.25).epsilon(1e-8));
    }

    SUBCASE("degenerate null space is reported") {
        // relaxation only, full 10-level space: excited/metastable levels
        // have no decay path, so the stationary state is not unique
        const RelaxationParams relax{2123.0, 3.54e5};
        auto [la, lb] = relaxation_operators(relax, kScheme);
        const Matrix h = Matrix::Zero(10, 10);
        CHECK_THROWS_AS((void)steady_state(h, {la, lb}), std::runtime_error);
    }
}

TEST_CASE("beta dephasing rate on the driven coherence pair") {
    // only L_beta: |rho_01| decays at exactly beta (delta m = 1)
    const double beta = 3.54e5;
    const SpinOperators s = spin_matrices();
    const Eigen::Matrix4cd lb = std::sqrt(2.0 * beta) * s.sz;

    Matrix rho0 = Matrix::Zero(4, 4);
    rho0(0, 0) = rho0(1, 1) = 0.5;
    rho0(0, 1) = rho0(1, 0) = 0.5;

    SegmentGenerator gen;
    gen.h_hz = Matrix::Zero(4, 4);
    gen.jump_ops = {lb};
    const double t_end = 2.0 / beta;
    const StateTrace tr = propagate(rho0, gen, t_end, EvolutionSettings{}, 8, 0.0, kGroundOnly);
    for (size_t k = 1; k < tr.rho.size(); ++k) {
        const double expect = 0.5 * std::exp(-beta * tr.t_s[k]);
        CHECK(std::abs(tr.rho[k](0, 1)) == doctest::Approx(expect).epsilon(0.01));
    }
}

TEST_CASE("alpha relaxation of a ground population imbalance at 1/(3 T1)") {
    const double t1 = 157e-6;
    const double alpha = 1.0 / (3.0 * t1);
    const SpinOperators s = spin_matrices();
    const Eigen::Matrix4cd la = std::sqrt(2.0 * alpha) * s.sx;

    Matrix rho0 = Matrix::Zero(4, 4);
    rho0(0, 0) = rho0(3, 3) = 0.5;  // polarized into |m| = 3/2

    // the zero-field splitting must be present: it keeps the Delta-m = 2
    // coherences the Sx dissipator generates far off resonance, which is
    // what reduces the dissipator to the population rate matrix behind
    // alpha = 1/(3 T1)
    SegmentGenerator gen;
    gen.h_hz = ground_hamiltonian(HamiltonianParams{}, 0.0);
    gen.jump_ops = {la};
    const StateTrace tr = propagate(rho0, gen, 2.0 * t1, EvolutionSettings{}, 10, 0.0, kGroundOnly);
    for (size_t k = 1; k < tr.rho.size(); ++k) {
        const double imbalance = (tr.rho[k](0, 0) + tr.rho[k](3, 3) - tr.rho[k](1, 1) -
                                  tr.rho[k](2, 2))
                                     .real();
        const double expect = std::exp(-tr.t_s[k] / t1);
        CHECK(imbalance == doctest::Approx(expect).epsilon(0.02));
    }
}

TEST_CASE("rotating frame reproduces lab-frame Rabi dynamics inside the RWA window") {
    // gamma B1 = f_drive / 20, the edge of the asserted validity window
    const double f_drive = 70e6;
    HamiltonianParams p;
    const double b1 = f_drive / 20.0 / p.gamma_hz_per_t;
    p.drive = DriveParams{b1, f_drive, 0.0};
    const double omega_r = std::sqrt(3.0) / 2.0 * p.gamma_hz_per_t * b1;
    const double duration = 10.0 / omega_r;

    Matrix rho0 = Matrix::Zero(4, 4);
    rho0(1, 1) = 1.0;

    SegmentGenerator rot;
    rot.h_hz = rotating_frame_hamiltonian(p, f_drive);
    const int n = 600;
    const StateTrace tr_rot =
        propagate(rho0, rot, duration, EvolutionSettings{}, n, 0.0, kGroundOnly);

    SegmentGenerator lab;
    lab.h_hz = ground_hamiltonian(p, 0.0);
    const SpinOperators s = spin_matrices();
    lab.h_hz -= p.gamma_hz_per_t * b1 * s.sx;  // ground_hamiltonian at t=0 includes the drive
    lab.h_drive_hz = p.gamma_hz_per_t * b1 * s.sx;
    lab.drive_f_hz = f_drive;
    lab.time_dependent = true;
    EvolutionSettings ls;
    ls.method = Method::adaptive_rk;
    ls.rel_tol = 1e-10;
    ls.abs_tol = 1e-13;
    ls.dt_max = 1e-9;
    const StateTrace tr_lab = propagate(rho0, lab, duration, ls, n, 0.0, kGroundOnly);

    Trace pop_rot, pop_lab;
    for (int k = 0; k <= n; ++k) {
        pop_rot.x.push_back(tr_rot.t_s[k]);
        pop_rot.y.push_back(tr_rot.rho[k](0, 0).real());
        pop_lab.x.push_back(tr_lab.t_s[k]);
        pop_lab.y.push_back(tr_lab.rho[k](0, 0).real());
    }
    const RabiFit fit_rot = extract_rabi(pop_rot);
    const RabiFit fit_lab = extract_rabi(pop_lab);
    REQUIRE(fit_rot.converged);
    REQUIRE(fit_lab.converged);
    CHECK(std::abs(fit_rot.omega_hz - fit_lab.omega_hz) / fit_lab.omega_hz < 0.01);
}

TEST_CASE("density invariants hold through randomized sequences") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int it = 0; it < 20; ++it) {
        Matrix rho = random_state(rng);
        for (int seg = 0; seg < 3; ++seg) {
            HamiltonianParams p;
            p.b0_t = u(rng) * 1e-3;
            const bool rf = u(rng) < 0.6;
            SegmentGenerator gen;
            if (rf) {
                p.drive = DriveParams{u(rng) * 3e-4, 70e6, u(rng) * 6.28};
                gen.h_hz = embed_ground(rotating_frame_hamiltonian(p, 60e6 + 2e7 * u(rng)),
                                        kScheme);
            } else {
                gen.h_hz = embed_ground(ground_hamiltonian(p, 0.0), kScheme);
            }
            gen.jump_ops = default_ops(u(rng) < 0.5);
            const StateTrace tr =
                propagate(rho, gen, u(rng) * 20e-6, EvolutionSettings{}, 2);
            rho = tr.rho.back();
        }
        CHECK(std::abs(rho.trace().real() - 1.0) < 1e-9);
        CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
        CHECK(es.eigenvalues().minCoeff() > -1e-9);
    }
}

}  // TEST_SUITE

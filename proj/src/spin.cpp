#include "sicmag/spin.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sicmag {

using std::numbers::pi;
using namespace std::complex_literals;

SpinOperators spin_matrices() {
    const double r3 = std::sqrt(3.0);
    Eigen::Matrix4cd sp = Eigen::Matrix4cd::Zero();  // raising operator S+
    sp(0, 1) = r3;
    sp(1, 2) = 2.0;
    sp(2, 3) = r3;

    SpinOperators s;
    s.sx = (sp + sp.adjoint()) / 2.0;
    s.sy = (sp - sp.adjoint()) / 2.0i;
    s.sz = Eigen::Vector4cd(1.5, 0.5, -0.5, -1.5).asDiagonal();
    return s;
}

void HamiltonianParams::validate() const {
    if (d_hz <= 0.0) throw std::invalid_argument("HamiltonianParams: d_hz must be > 0");
    if (gamma_hz_per_t <= 0.0)
        throw std::invalid_argument("HamiltonianParams: gamma_hz_per_t must be > 0");
    if (drive && drive->b1_t < 0.0)
        throw std::invalid_argument("HamiltonianParams: drive b1_t must be >= 0");
}

Eigen::Matrix4cd ground_hamiltonian(const HamiltonianParams& p, double t_s) {
    p.validate();
    const SpinOperators s = spin_matrices();
    Eigen::Matrix4cd h = p.d_hz * (s.sz * s.sz - 1.25 * Eigen::Matrix4cd::Identity()) +
                         p.gamma_hz_per_t * p.b0_t * s.sz;
    if (p.drive && p.drive->b1_t > 0.0) {
        const double amp = p.gamma_hz_per_t * p.drive->b1_t *
                           std::cos(2.0 * pi * p.drive->f_hz * t_s + p.drive->phase_rad);
        h += amp * s.sx;
    }
    return h;
}

Eigen::Matrix4cd rotating_frame_hamiltonian(const HamiltonianParams& p, double f_drive_hz) {
    p.validate();
    if (!p.drive)
        throw std::invalid_argument(
            "rotating_frame_hamiltonian: no drive present; use the lab-frame path");
    if (f_drive_hz <= 0.0)
        throw std::invalid_argument("rotating_frame_hamiltonian: f_drive must be > 0");

    const SpinOperators s = spin_matrices();
    Eigen::Matrix4cd h = p.d_hz * (s.sz * s.sz - 1.25 * Eigen::Matrix4cd::Identity()) +
                         (p.gamma_hz_per_t * p.b0_t - f_drive_hz) * s.sz;

    // RWA drive: gamma B1/4 (e^{-i phi} S+ + e^{+i phi} S-).
    const double r3 = std::sqrt(3.0);
    Eigen::Matrix4cd sp = Eigen::Matrix4cd::Zero();
    sp(0, 1) = r3;
    sp(1, 2) = 2.0;
    sp(2, 3) = r3;
    const std::complex<double> c =
        p.gamma_hz_per_t * p.drive->b1_t / 4.0 * std::exp(-1.0i * p.drive->phase_rad);
    h += c * sp + std::conj(c) * sp.adjoint();
    return h;
}

std::complex<double> transition_matrix_element(const Eigen::Vector4cd& state_a,
                                               const Eigen::Vector4cd& state_b,
                                               const Eigen::Vector3d& b1_vec_t) {
    constexpr double norm_tol = 1e-9;
    if (std::abs(state_a.norm() - 1.0) > norm_tol || std::abs(state_b.norm() - 1.0) > norm_tol)
        throw std::invalid_argument("transition_matrix_element: states must be normalized");
    const SpinOperators s = spin_matrices();
    const Eigen::Matrix4cd op =
        b1_vec_t.x() * s.sx + b1_vec_t.y() * s.sy + b1_vec_t.z() * s.sz;
    return state_b.adjoint() * op * state_a;
}

std::pair<double, double> resonance_frequencies(const HamiltonianParams& p) {
    p.validate();
    const double zeeman = p.gamma_hz_per_t * std::abs(p.b0_t);
    return {2.0 * p.d_hz - zeeman, 2.0 * p.d_hz + zeeman};
}

}  // namespace sicmag

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>

#include "sicmag/constants.hpp"

namespace sicmag {

// Spin-3/2 operators in the fixed basis (+3/2, +1/2, -1/2, -3/2).
// This ordering is used everywhere in the codebase.
struct SpinOperators {
    Eigen::Matrix4cd sx;
    Eigen::Matrix4cd sy;
    Eigen::Matrix4cd sz;
};

SpinOperators spin_matrices();

struct DriveParams {
    double b1_t = 0.0;       // RF amplitude, Tesla
    double f_hz = 0.0;       // carrier frequency, Hz
    double phase_rad = 0.0;  // carrier phase
};

// Ground-state Hamiltonian parameters. B0 is restricted to the symmetry
// axis; a transverse static field is rejected upstream, not projected.
struct HamiltonianParams {
    double d_hz = kDefaultZeroFieldSplittingHz;  // zero-field splitting D
    double gamma_hz_per_t = PhysicalConstants{}.gamma_hz_per_t();
    double b0_t = 0.0;  // static field along the symmetry axis
    std::optional<DriveParams> drive;

    void validate() const;
};

// H/h in Hz: D (Sz^2 - 5/4) + gamma B0 Sz + gamma B1 cos(2 pi f t + phi) Sx.
Eigen::Matrix4cd ground_hamiltonian(const HamiltonianParams& p, double t_s);

// Time-independent Hamiltonian in the frame rotating at f_drive about Sz,
// counter-rotating drive terms dropped. Diagonal carries the detunings
// D (m^2 - 5/4) + (gamma B0 - f_drive) m; the ladder coupling is
// (gamma B1 / 2) e^{-i phi} on the upper triangle of the Sx ladder.
// Throws if p.drive is absent (the lab-frame path must be used then).
Eigen::Matrix4cd rotating_frame_hamiltonian(const HamiltonianParams& p, double f_drive_hz);

// First-order drive matrix element P = <b| B1 . S |a> for a 3-vector RF
// amplitude (Tesla). States must be normalized to 1e-9.
std::complex<double> transition_matrix_element(const Eigen::Vector4cd& state_a,
                                               const Eigen::Vector4cd& state_b,
                                               const Eigen::Vector3d& b1_vec_t);

// The two |±1/2> <-> |±3/2> transition frequencies, sorted ascending:
// (2D - gamma B0, 2D + gamma B0). Equal at zero field.
std::pair<double, double> resonance_frequencies(const HamiltonianParams& p);

}  // namespace sicmag

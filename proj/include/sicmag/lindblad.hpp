#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "sicmag/levels.hpp"
#include "sicmag/rates.hpp"

namespace sicmag {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// sqrt(r) |u><v|.
Matrix jump_operator(int u, int v, double rate_per_s, int n_levels = 10);

// Jump operators for every active rate entry.
std::vector<Matrix> jump_operators(const std::vector<RateEntry>& entries, int n_levels);

// L_alpha = sqrt(2 alpha) Sx and L_beta = sqrt(2 beta) Sz embedded in the
// ground block; all other rows and columns exactly zero.
std::pair<Matrix, Matrix> relaxation_operators(const RelaxationParams& p,
                                               const LevelScheme& scheme = LevelScheme::hybrid10());

// Embed a 4x4 ground-block operator into the full space.
Matrix embed_ground(const Eigen::Matrix4cd& op, const LevelScheme& scheme);

// d rho/dt for H in Hz units: -i 2 pi [H, rho] + sum_i D[L_i] rho.
Matrix lindblad_rhs(const Matrix& rho, const Matrix& h_hz, const std::vector<Matrix>& ops);

// The n^2 x n^2 superoperator of the same generator, acting on column-major
// vec(rho). Exposed in two parts so sweeps can reuse the dissipator while
// the Hamiltonian changes.
Matrix hamiltonian_superop(const Matrix& h_hz);
Matrix dissipator_superop(const std::vector<Matrix>& ops, int n_levels);
Matrix liouvillian(const Matrix& h_hz, const std::vector<Matrix>& ops);

// Throws std::runtime_error if rho violates the density-matrix invariants
// (Hermiticity 1e-10, trace 1e-9, min eigenvalue >= -1e-9) or carries
// coherences outside the ground block.
void check_density(const Matrix& rho, const LevelScheme& scheme, const char* where = "");

enum class Frame { rotating, lab };
enum class Method { superop_exp, adaptive_rk };

struct EvolutionSettings {
    Method method = Method::superop_exp;
    double dt_max = 1e-6;    // max integrator step / default sample spacing
    double rel_tol = 1e-9;   // adaptive integrator tolerances
    double abs_tol = 1e-12;
    Frame frame = Frame::rotating;

    void validate() const;
};

// Controls of one piecewise-constant segment, resolved to operators. With
// time_dependent set, h(t) = h_hz + cos(2 pi f t + phase) h_drive_hz and the
// adaptive integrator is used regardless of the configured method.
struct SegmentGenerator {
    Matrix h_hz;
    std::vector<Matrix> jump_ops;
    Matrix h_drive_hz;
    double drive_f_hz = 0.0;
    double drive_phase_rad = 0.0;
    bool time_dependent = false;
};

struct StateTrace {
    std::vector<double> t_s;
    std::vector<Matrix> rho;
};

// Evolve rho0 for `duration_s`, returning n_samples+1 states at uniform
// times (including both endpoints). t0_s is the absolute segment start,
// needed for the lab-frame drive phase. The final state is checked against
// the density invariants.
StateTrace propagate(const Matrix& rho0, const SegmentGenerator& gen, double duration_s,
                     const EvolutionSettings& settings, int n_samples = 1, double t0_s = 0.0,
                     const LevelScheme& scheme = LevelScheme::hybrid10());

// Stationary state of the generator, trace 1, residual ||L(rho)||_F < 1e-10.
// Throws std::runtime_error when the null space is degenerate (suggesting
// the long-time propagation fallback).
Matrix steady_state(const Matrix& h_hz, const std::vector<Matrix>& ops);

// Exponential of one segment Liouvillian, applied to vectorized states.
// Diagonalizes once and falls back to scaling-and-squaring if the
// eigenbasis fails a round-trip identity check. Not thread-safe; use one
// instance per worker.
class SegmentPropagator {
public:
    explicit SegmentPropagator(const Matrix& liouvillian_matrix);

    Vector evolve(const Vector& vec_rho, double t_s) const;
    Matrix evolve_state(const Matrix& rho, double t_s) const;
    bool diagonalized() const { return diag_ok_; }

private:
    Eigen::Index dim_;
    bool diag_ok_ = false;
    double eig_time_limit_ = 0.0;
    Matrix eigvecs_, eigvecs_inv_;
    Vector eigvals_;
    Matrix gen_;  // kept for the expm fallback
    mutable double cached_t_ = -1.0;
    mutable Matrix cached_exp_;
};

}  // namespace sicmag

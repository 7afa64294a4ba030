#include "sicmag/lindblad.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "sicmag/spin.hpp"

namespace sicmag {

using std::numbers::pi;
using namespace std::complex_literals;

Matrix jump_operator(int u, int v, double rate_per_s, int n_levels) {
    if (u == v) throw std::invalid_argument("jump_operator: u and v must differ");
    if (rate_per_s < 0.0) throw std::invalid_argument("jump_operator: rate must be >= 0");
    if (u < 0 || u >= n_levels || v < 0 || v >= n_levels)
        throw std::invalid_argument("jump_operator: level index out of range");
    Matrix l = Matrix::Zero(n_levels, n_levels);
    l(u, v) = std::sqrt(rate_per_s);
    return l;
}

std::vector<Matrix> jump_operators(const std::vector<RateEntry>& entries, int n_levels) {
    std::vector<Matrix> ops;
    ops.reserve(entries.size());
    for (const RateEntry& e : entries)
        if (e.rate_per_s > 0.0) ops.push_back(jump_operator(e.to, e.from, e.rate_per_s, n_levels));
    return ops;
}

Matrix embed_ground(const Eigen::Matrix4cd& op, const LevelScheme& scheme) {
    scheme.validate();
    Matrix full = Matrix::Zero(scheme.n_levels, scheme.n_levels);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) full(scheme.ground[a], scheme.ground[b]) = op(a, b);
    return full;
}

std::pair<Matrix, Matrix> relaxation_operators(const RelaxationParams& p,
                                               const LevelScheme& scheme) {
    if (p.alpha_per_s < 0.0 || p.beta_per_s < 0.0)
        throw std::invalid_argument("relaxation_operators: alpha and beta must be >= 0");
    const SpinOperators s = spin_matrices();
    const Eigen::Matrix4cd la = std::sqrt(2.0 * p.alpha_per_s) * s.sx;
    const Eigen::Matrix4cd lb = std::sqrt(2.0 * p.beta_per_s) * s.sz;
    return {embed_ground(la, scheme), embed_ground(lb, scheme)};
}

Matrix lindblad_rhs(const Matrix& rho, const Matrix& h_hz, const std::vector<Matrix>& ops) {
    const Eigen::Index n = rho.rows();
    if (rho.cols() != n || h_hz.rows() != n || h_hz.cols() != n)
        throw std::invalid_argument("lindblad_rhs: dimension mismatch");
    Matrix d = -2.0i * pi * (h_hz * rho - rho * h_hz);
    for (const Matrix& l : ops) {
        if (l.rows() != n || l.cols() != n)
            throw std::invalid_argument("lindblad_rhs: operator dimension mismatch");
        const Matrix ldl = l.adjoint() * l;
        d += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
    }
    return d;
}

Matrix hamiltonian_superop(const Matrix& h_hz) {
    const Eigen::Index n = h_hz.rows();
    const Matrix id = Matrix::Identity(n, n);
    return -2.0i * pi *
           (Eigen::kroneckerProduct(id, h_hz) - Eigen::kroneckerProduct(h_hz.transpose(), id))
               .eval();
}

Matrix dissipator_superop(const std::vector<Matrix>& ops, int n_levels) {
    const Matrix id = Matrix::Identity(n_levels, n_levels);
    Matrix lk = Matrix::Zero(n_levels * n_levels, n_levels * n_levels);
    for (const Matrix& l : ops) {
        const Matrix ldl = l.adjoint() * l;
        lk += Eigen::kroneckerProduct(l.conjugate(), l).eval() -
              0.5 * (Eigen::kroneckerProduct(id, ldl) +
                     Eigen::kroneckerProduct(ldl.transpose(), id));
    }
    return lk;
}

Matrix liouvillian(const Matrix& h_hz, const std::vector<Matrix>& ops) {
    return hamiltonian_superop(h_hz) + dissipator_superop(ops, static_cast<int>(h_hz.rows()));
}

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

}  // namespace

void check_density(const Matrix& rho, const LevelScheme& scheme, const char* where) {
    const auto fail = [&](const std::string& what) {
        std::ostringstream msg;
        msg << "density-matrix invariant violated";
        if (where && *where) msg << " (" << where << ")";
        msg << ": " << what;
        throw std::runtime_error(msg.str());
    };
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10) fail("Hermiticity deviation " + sci(herm));
    const double tr = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    if (tr > 1e-9) fail("trace deviation " + sci(tr));
    Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
    if (es.eigenvalues().minCoeff() < -1e-9)
        fail("negative eigenvalue " + sci(es.eigenvalues().minCoeff()));
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            if (i == j) continue;
            if (scheme.is_ground(static_cast<int>(i)) && scheme.is_ground(static_cast<int>(j)))
                continue;
            if (std::abs(rho(i, j)) > 1e-10) fail("coherence outside the ground block");
        }
}

void EvolutionSettings::validate() const {
    if (dt_max <= 0.0) throw std::invalid_argument("EvolutionSettings: dt_max must be > 0");
    if (rel_tol <= 0.0 || abs_tol <= 0.0)
        throw std::invalid_argument("EvolutionSettings: tolerances must be > 0");
}

SegmentPropagator::SegmentPropagator(const Matrix& liouvillian_matrix)
    : dim_(liouvillian_matrix.rows()), gen_(liouvillian_matrix) {
    Eigen::ComplexEigenSolver<Matrix> es(gen_);
    if (es.info() == Eigen::Success) {
        eigvecs_ = es.eigenvectors();
        eigvals_ = es.eigenvalues();
        Eigen::PartialPivLU<Matrix> lu(eigvecs_);
        eigvecs_inv_ = lu.inverse();
        const double err =
            (eigvecs_ * eigvecs_inv_ - Matrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
        diag_ok_ = std::isfinite(err) && err < 1e-9;
    }
    // eigenvalue roundoff ~ eps ||L|| is exponentiated over t; past this
    // horizon the scaling-and-squaring path is the more accurate one
    const double norm = gen_.cwiseAbs().rowwise().sum().maxCoeff();
    eig_time_limit_ = norm > 0.0 ? 1e-10 / (2.3e-16 * norm) : 1e300;
}

Vector SegmentPropagator::evolve(const Vector& vec_rho, double t_s) const {
    if (vec_rho.size() != dim_) throw std::invalid_argument("SegmentPropagator: size mismatch");
    if (t_s < 0.0) throw std::invalid_argument("SegmentPropagator: negative time");
    if (t_s == 0.0) return vec_rho;
    if (diag_ok_ && t_s <= eig_time_limit_) {
        Vector coeff = eigvecs_inv_ * vec_rho;
        coeff.array() *= (eigvals_.array() * t_s).exp();
        return eigvecs_ * coeff;
    }
    if (cached_t_ != t_s) {
        cached_exp_ = (gen_ * t_s).exp();
        cached_t_ = t_s;
    }
    return cached_exp_ * vec_rho;
}

Matrix SegmentPropagator::evolve_state(const Matrix& rho, double t_s) const {
    const Eigen::Index n = rho.rows();
    Vector v = Eigen::Map<const Vector>(rho.data(), n * n);
    Vector w = evolve(v, t_s);
    // the Lindblad generator preserves Hermiticity exactly; averaging with
    // the adjoint removes eigendecomposition roundoff
    Matrix out = Eigen::Map<const Matrix>(w.data(), n, n);
    return (out + out.adjoint()) / 2.0;
}

namespace {

using OdeState = std::vector<std::complex<double>>;

struct LindbladOde {
    const SegmentGenerator& gen;
    std::vector<Matrix> ldl;  // precomputed L^dagger L
    Eigen::Index n;

    explicit LindbladOde(const SegmentGenerator& g)
        : gen(g), n(g.h_hz.rows()) {
        ldl.reserve(gen.jump_ops.size());
        for (const Matrix& l : gen.jump_ops) ldl.push_back(l.adjoint() * l);
    }

    void operator()(const OdeState& x, OdeState& dxdt, double t) const {
        Eigen::Map<const Matrix> rho(x.data(), n, n);
        dxdt.resize(x.size());
        Eigen::Map<Matrix> out(dxdt.data(), n, n);
        Matrix h = gen.h_hz;
        if (gen.time_dependent)
            h += std::cos(2.0 * pi * gen.drive_f_hz * t + gen.drive_phase_rad) * gen.h_drive_hz;
        Matrix d = -2.0i * pi * (h * rho - rho * h);
        for (size_t k = 0; k < gen.jump_ops.size(); ++k) {
            const Matrix& l = gen.jump_ops[k];
            d += l * rho * l.adjoint() - 0.5 * (ldl[k] * rho + rho * ldl[k]);
        }
        out = d;
    }
};

StateTrace propagate_adaptive(const Matrix& rho0, const SegmentGenerator& gen, double duration_s,
                              const EvolutionSettings& settings, int n_samples, double t0_s) {
    namespace ode = boost::numeric::odeint;
    const Eigen::Index n = rho0.rows();

    const double dt_sample = duration_s / n_samples;
    // the observation grid itself enforces dt_max: refine it if needed
    int refine = std::max(1, static_cast<int>(std::ceil(dt_sample / settings.dt_max)));
    const double dt_obs = dt_sample / refine;

    OdeState x(rho0.data(), rho0.data() + n * n);
    StateTrace trace;
    trace.t_s.reserve(n_samples + 1);
    trace.rho.reserve(n_samples + 1);

    LindbladOde sys(gen);
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<OdeState>>(settings.abs_tol,
                                                                           settings.rel_tol);
    long step_count = 0;
    auto observer = [&](const OdeState& s, double t) {
        if (step_count % refine == 0) {
            trace.t_s.push_back(t);
            trace.rho.push_back(Eigen::Map<const Matrix>(s.data(), n, n));
        }
        ++step_count;
    };
    try {
        ode::integrate_const(stepper, sys, x, t0_s, t0_s + duration_s + dt_obs / 2.0, dt_obs,
                             observer);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("adaptive integration failed: ") + e.what());
    }
    if (static_cast<int>(trace.rho.size()) != n_samples + 1)
        throw std::runtime_error("adaptive integration produced an incomplete sample grid");
    return trace;
}

}  // namespace

StateTrace propagate(const Matrix& rho0, const SegmentGenerator& gen, double duration_s,
                     const EvolutionSettings& settings, int n_samples, double t0_s,
                     const LevelScheme& scheme) {
    settings.validate();
    if (duration_s < 0.0) throw std::invalid_argument("propagate: negative duration");
    if (n_samples < 1) throw std::invalid_argument("propagate: n_samples must be >= 1");
    check_density(rho0, scheme, "propagate input");

    StateTrace trace;
    if (duration_s == 0.0) {
        trace.t_s = {t0_s};
        trace.rho = {rho0};
        return trace;
    }

    if (gen.time_dependent || settings.method == Method::adaptive_rk) {
        trace = propagate_adaptive(rho0, gen, duration_s, settings, n_samples, t0_s);
    } else {
        SegmentPropagator prop(liouvillian(gen.h_hz, gen.jump_ops));
        const double dt = duration_s / n_samples;
        trace.t_s.reserve(n_samples + 1);
        trace.rho.reserve(n_samples + 1);
        if (prop.diagonalized()) {
            for (int k = 0; k <= n_samples; ++k) {
                trace.t_s.push_back(t0_s + k * dt);
                trace.rho.push_back(prop.evolve_state(rho0, k * dt));
            }
        } else {
            Matrix rho = rho0;
            for (int k = 0; k <= n_samples; ++k) {
                trace.t_s.push_back(t0_s + k * dt);
                trace.rho.push_back(rho);
                if (k < n_samples) rho = prop.evolve_state(rho, dt);
            }
        }
    }
    check_density(trace.rho.back(), scheme, "propagate output");
    return trace;
}

Matrix steady_state(const Matrix& h_hz, const std::vector<Matrix>& ops) {
    const Eigen::Index n = h_hz.rows();
    const Eigen::Index n2 = n * n;
    Matrix lk = liouvillian(h_hz, ops);
    const double scale = std::max(1.0, lk.cwiseAbs().maxCoeff());
    lk /= scale;

    // Replace the row of the (0,0) component (redundant by trace
    // preservation) with the trace functional.
    Matrix m = lk;
    m.row(0).setZero();
    for (Eigen::Index i = 0; i < n; ++i) m(0, i * n + i) = 1.0;
    Vector b = Vector::Zero(n2);
    b(0) = 1.0;

    Eigen::FullPivLU<Matrix> lu(m);
    if (lu.rank() < n2)
        throw std::runtime_error(
            "steady_state: degenerate null space; use long-time propagation instead");
    Vector v = lu.solve(b);
    v += lu.solve(b - m * v);  // one step of iterative refinement

    const double residual = (lk * v).norm();
    if (!std::isfinite(residual) || residual > 1e-10)
        throw std::runtime_error("steady_state: generator residual " + std::to_string(residual) +
                                 " exceeds tolerance");
    return Eigen::Map<const Matrix>(v.data(), n, n);
}

}  // namespace sicmag

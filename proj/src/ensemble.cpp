#include "sicmag/ensemble.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sicmag/rng.hpp"

namespace sicmag {

using std::numbers::pi;

void EnsembleSpec::validate() const {
    if (n < 1) throw std::invalid_argument("EnsembleSpec: n must be >= 1");
    if (detuning.kind == DetuningDistribution::Kind::lorentzian && detuning.hwhm_hz <= 0.0)
        throw std::invalid_argument("EnsembleSpec: lorentzian hwhm must be > 0");
    if (b1_scale.kind == B1ScaleDistribution::Kind::uniform &&
        (b1_scale.half_width <= 0.0 || b1_scale.half_width >= 1.0))
        throw std::invalid_argument("EnsembleSpec: b1 half_width must lie in (0, 1)");
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    // Jacobi matrix of the Legendre recurrence
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        j(k - 1, k) = b;
        j(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    nodes.resize(n);
    weights.resize(n);
    for (int k = 0; k < n; ++k) {
        nodes[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        weights[k] = 2.0 * v0 * v0;
    }
}

std::vector<EnsembleMember> ensemble_members(const EnsembleSpec& spec, uint64_t seed) {
    spec.validate();
    const bool det_active = spec.detuning.kind == DetuningDistribution::Kind::lorentzian;
    const bool b1_active = spec.b1_scale.kind == B1ScaleDistribution::Kind::uniform;

    std::vector<EnsembleMember> members;
    if (!det_active && !b1_active) {
        members.push_back({0.0, 1.0, 1.0});
        return members;
    }

    if (spec.sampling == SamplingMode::random) {
        members.reserve(spec.n);
        for (int k = 0; k < spec.n; ++k) {
            Rng rng(mix_seed(seed, static_cast<uint64_t>(k)));
            EnsembleMember m;
            if (det_active) m.detuning_hz = rng.cauchy(spec.detuning.hwhm_hz);
            if (b1_active)
                m.b1_scale = rng.uniform(1.0 - spec.b1_scale.half_width,
                                         1.0 + spec.b1_scale.half_width);
            m.weight = 1.0 / spec.n;
            members.push_back(m);
        }
        return members;
    }

    // Quadrature: substitute delta = gamma tan(theta) so the Lorentzian
    // measure becomes uniform in theta; midpoint nodes handle the tails.
    std::vector<double> det_nodes{0.0}, det_w{1.0};
    if (det_active) {
        det_nodes.clear();
        det_w.clear();
        for (int k = 0; k < spec.n; ++k) {
            const double theta = pi * ((k + 0.5) / spec.n - 0.5);
            det_nodes.push_back(spec.detuning.hwhm_hz * std::tan(theta));
            det_w.push_back(1.0 / spec.n);
        }
    }
    std::vector<double> b1_nodes{1.0}, b1_w{1.0};
    if (b1_active) {
        std::vector<double> x, w;
        gauss_legendre(spec.n, x, w);
        b1_nodes.clear();
        b1_w.clear();
        for (int k = 0; k < spec.n; ++k) {
            b1_nodes.push_back(1.0 + spec.b1_scale.half_width * x[k]);
            b1_w.push_back(w[k] / 2.0);
        }
    }
    members.reserve(det_nodes.size() * b1_nodes.size());
    for (size_t a = 0; a < det_nodes.size(); ++a)
        for (size_t b = 0; b < b1_nodes.size(); ++b)
            members.push_back({det_nodes[a], b1_nodes[b], det_w[a] * b1_w[b]});
    return members;
}

std::vector<double> ensemble_average(
    const std::function<std::vector<double>(const EnsembleMember&)>& run,
    const std::vector<EnsembleMember>& members) {
    if (members.empty()) throw std::invalid_argument("ensemble_average: no members");
    std::vector<double> acc;
    for (const EnsembleMember& m : members) {
        const std::vector<double> cur = run(m);
        if (acc.empty()) acc.assign(cur.size(), 0.0);
        if (cur.size() != acc.size())
            throw std::invalid_argument("ensemble_average: mismatched curve lengths");
        for (size_t i = 0; i < cur.size(); ++i) acc[i] += m.weight * cur[i];
    }
    return acc;
}

}  // namespace sicmag

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "sicmag/trace.hpp"

namespace sicmag {

// Curve families used by the measurement fits. Parameter layouts:
//   lorentzian        (b, a, x0, gamma)        y = b + a g^2/((x-x0)^2 + g^2)
//   double_lorentzian (b, a1, x01, g1, a2, x02, g2)
//   exp_decay         (b, a, t_c)              y = b + a exp(-x/t_c)
//   damped_cosine     (b, a, t_c, f, phi)      y = b + a exp(-x/t_c) cos(2 pi f x + phi)
//   stretched_exp     (b, a, t_c, p)           y = b + a exp(-(x/t_c)^p)
enum class FitModelKind { lorentzian, double_lorentzian, exp_decay, damped_cosine, stretched_exp };

struct FitResult {
    FitModelKind kind = FitModelKind::lorentzian;
    Eigen::VectorXd params;
    Eigen::VectorXd sigmas;  // one-sigma from the Jacobian at the optimum
    double residual_rms = 0.0;
    bool converged = false;
    int iterations = 0;
};

int parameter_count(FitModelKind kind);
double evaluate_model(FitModelKind kind, const Eigen::VectorXd& params, double x);

// Damped least squares with multiplicative x10 / /10 damping, at most 200
// iterations, relative gradient tolerance 1e-10. Initial guesses come from
// the heuristics described in the implementation when not supplied.
// Non-convergence is flagged, not thrown; degenerate data (fewer than
// 2 + parameter-count points, non-increasing x, zero variance) throws.
FitResult fit_curve(FitModelKind kind, const std::vector<double>& x,
                    const std::vector<double>& y,
                    const std::optional<Eigen::VectorXd>& init = std::nullopt);

// FWHM = 2 gamma per Lorentzian line; one value for the single form, two
// (in parameter order) for the double form. Throws on other model kinds or
// unconverged fits.
std::vector<double> fwhm(const FitResult& fit);

struct RabiFit {
    double omega_hz = 0.0;
    double decay_s = 0.0;
    bool converged = false;
};

// Damped-cosine fit of an oscillatory trace; omega is the fitted frequency.
RabiFit extract_rabi(const Trace& trace);

std::string to_string(FitModelKind kind);
FitModelKind fit_model_from_string(const std::string& name);

}  // namespace sicmag

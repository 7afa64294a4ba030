#include "sicmag/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace sicmag {

using std::numbers::pi;

int parameter_count(FitModelKind kind) {
    switch (kind) {
        case FitModelKind::lorentzian: return 4;
        case FitModelKind::double_lorentzian: return 7;
        case FitModelKind::exp_decay: return 3;
        case FitModelKind::damped_cosine: return 5;
        case FitModelKind::stretched_exp: return 4;
    }
    throw std::invalid_argument("unknown fit model");
}

namespace {

double lorentz_term(double a, double x0, double g, double x) {
    const double d = (x - x0) * (x - x0) + g * g;
    return a * g * g / d;
}

}  // namespace

double evaluate_model(FitModelKind kind, const Eigen::VectorXd& p, double x) {
    switch (kind) {
        case FitModelKind::lorentzian:
            return p(0) + lorentz_term(p(1), p(2), p(3), x);
        case FitModelKind::double_lorentzian:
            return p(0) + lorentz_term(p(1), p(2), p(3), x) + lorentz_term(p(4), p(5), p(6), x);
        case FitModelKind::exp_decay:
            return p(0) + p(1) * std::exp(-x / p(2));
        case FitModelKind::damped_cosine:
            return p(0) + p(1) * std::exp(-x / p(2)) * std::cos(2.0 * pi * p(3) * x + p(4));
        case FitModelKind::stretched_exp: {
            const double u = x <= 0.0 ? 0.0 : std::pow(x / p(2), p(3));
            return p(0) + p(1) * std::exp(-u);
        }
    }
    throw std::invalid_argument("unknown fit model");
}

namespace {

void lorentz_jacobian(double a, double x0, double g, double x, double* da, double* dx0,
                      double* dg) {
    const double dx = x - x0;
    const double d = dx * dx + g * g;
    *da = g * g / d;
    *dx0 = 2.0 * a * g * g * dx / (d * d);
    *dg = 2.0 * a * g * dx * dx / (d * d);
}

Eigen::MatrixXd jacobian(FitModelKind kind, const Eigen::VectorXd& p,
                         const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd j(n, p.size());
    for (int i = 0; i < n; ++i) {
        const double xi = x[i];
        switch (kind) {
            case FitModelKind::lorentzian: {
                double da, dx0, dg;
                lorentz_jacobian(p(1), p(2), p(3), xi, &da, &dx0, &dg);
                j(i, 0) = 1.0;
                j(i, 1) = da;
                j(i, 2) = dx0;
                j(i, 3) = dg;
                break;
            }
            case FitModelKind::double_lorentzian: {
                double da, dx0, dg;
                j(i, 0) = 1.0;
                lorentz_jacobian(p(1), p(2), p(3), xi, &da, &dx0, &dg);
                j(i, 1) = da;
                j(i, 2) = dx0;
                j(i, 3) = dg;
                lorentz_jacobian(p(4), p(5), p(6), xi, &da, &dx0, &dg);
                j(i, 4) = da;
                j(i, 5) = dx0;
                j(i, 6) = dg;
                break;
            }
            case FitModelKind::exp_decay: {
                const double e = std::exp(-xi / p(2));
                j(i, 0) = 1.0;
                j(i, 1) = e;
                j(i, 2) = p(1) * e * xi / (p(2) * p(2));
                break;
            }
            case FitModelKind::damped_cosine: {
                const double e = std::exp(-xi / p(2));
                const double arg = 2.0 * pi * p(3) * xi + p(4);
                const double c = std::cos(arg), s = std::sin(arg);
                j(i, 0) = 1.0;
                j(i, 1) = e * c;
                j(i, 2) = p(1) * e * c * xi / (p(2) * p(2));
                j(i, 3) = -p(1) * e * s * 2.0 * pi * xi;
                j(i, 4) = -p(1) * e * s;
                break;
            }
            case FitModelKind::stretched_exp: {
                const double u = xi <= 0.0 ? 0.0 : std::pow(xi / p(2), p(3));
                const double e = std::exp(-u);
                j(i, 0) = 1.0;
                j(i, 1) = e;
                j(i, 2) = p(1) * e * p(3) * u / p(2);
                j(i, 3) = xi <= 0.0 ? 0.0 : -p(1) * e * u * std::log(xi / p(2));
                break;
            }
        }
    }
    return j;
}

double median(std::vector<double> v) {
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

// half-prominence half-width around an extremum
double half_width(const std::vector<double>& x, const std::vector<double>& y, size_t peak,
                  double baseline) {
    const double half = std::abs(y[peak] - baseline) / 2.0;
    const double span = x.back() - x.front();
    double left = x.front(), right = x.back();
    for (size_t i = peak; i-- > 0;)
        if (std::abs(y[i] - baseline) < half) {
            left = x[i];
            break;
        }
    for (size_t i = peak + 1; i < y.size(); ++i)
        if (std::abs(y[i] - baseline) < half) {
            right = x[i];
            break;
        }
    double w = (right - left) / 2.0;
    if (w <= 0.0) w = span / 10.0;
    return w;
}

// discrete-spectrum peak of the mean-subtracted data, with the complex
// amplitude for phase/amplitude seeds
void spectrum_peak(const std::vector<double>& x, const std::vector<double>& y, double* f_out,
                   double* amp_out, double* phase_out) {
    const size_t n = x.size();
    const double span = x.back() - x.front();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);

    const int n_freq = static_cast<int>(2 * n);
    const double f_max = 0.5 * static_cast<double>(n - 1) / span;  // Nyquist-like bound
    double best = -1.0, best_f = 1.0 / span;
    std::complex<double> best_s;
    for (int k = 1; k <= n_freq; ++k) {
        const double f = f_max * k / n_freq;
        std::complex<double> s = 0.0;
        for (size_t i = 0; i < n; ++i)
            s += (y[i] - mean) * std::exp(std::complex<double>(0.0, -2.0 * pi * f * (x[i] - x[0])));
        if (std::abs(s) > best) {
            best = std::abs(s);
            best_f = f;
            best_s = s;
        }
    }
    *f_out = best_f;
    *amp_out = 2.0 * best / static_cast<double>(n);
    // shift the reference back to x = 0
    *phase_out = std::arg(best_s) - 2.0 * pi * best_f * (-x[0]);
}

// log-envelope regression for the decay-constant seed
double decay_seed(const std::vector<double>& x, const std::vector<double>& y, double baseline,
                  double amp) {
    const double span = x.back() - x.front();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dev = std::abs(y[i] - baseline);
        if (dev < 0.05 * std::abs(amp)) continue;
        const double ly = std::log(dev);
        sx += x[i];
        sy += ly;
        sxx += x[i] * x[i];
        sxy += x[i] * ly;
        ++m;
    }
    if (m < 2) return span / 3.0;
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) return span / 3.0;
    const double slope = (m * sxy - sx * sy) / denom;
    if (slope >= 0.0) return span;  // no visible decay
    return std::min(-1.0 / slope, 100.0 * span);
}

Eigen::VectorXd initial_guess(FitModelKind kind, const std::vector<double>& x,
                              const std::vector<double>& y) {
    const size_t n = x.size();
    const double base = median(y);
    Eigen::VectorXd p(parameter_count(kind));
    switch (kind) {
        case FitModelKind::lorentzian: {
            size_t peak = 0;
            for (size_t i = 1; i < n; ++i)
                if (std::abs(y[i] - base) > std::abs(y[peak] - base)) peak = i;
            p << base, y[peak] - base, x[peak], half_width(x, y, peak, base);
            break;
        }
        case FitModelKind::double_lorentzian: {
            size_t peak1 = 0;
            for (size_t i = 1; i < n; ++i)
                if (std::abs(y[i] - base) > std::abs(y[peak1] - base)) peak1 = i;
            const double w1 = half_width(x, y, peak1, base);
            // mask the first line, then take the largest remaining deviation
            size_t peak2 = peak1;
            double best = -1.0;
            for (size_t i = 0; i < n; ++i) {
                if (std::abs(x[i] - x[peak1]) < 2.0 * w1) continue;
                if (std::abs(y[i] - base) > best) {
                    best = std::abs(y[i] - base);
                    peak2 = i;
                }
            }
            if (peak2 == peak1)  // no second line visible; split the first
                peak2 = peak1 > n / 2 ? peak1 - n / 4 : peak1 + n / 4;
            const double w2 = half_width(x, y, peak2, base);
            p << base, y[peak1] - base, x[peak1], w1, y[peak2] - base, x[peak2], w2;
            break;
        }
        case FitModelKind::exp_decay: {
            const double tail = y.back();
            const double amp = y.front() - tail;
            p << tail, amp, decay_seed(x, y, tail, amp);
            break;
        }
        case FitModelKind::damped_cosine: {
            double mean = 0.0;
            for (double v : y) mean += v;
            mean /= static_cast<double>(n);
            double f, amp, phase;
            spectrum_peak(x, y, &f, &amp, &phase);
            p << mean, amp, decay_seed(x, y, mean, amp), f, phase;
            break;
        }
        case FitModelKind::stretched_exp: {
            const double tail = y.back();
            const double amp = y.front() - tail;
            p << tail, amp, decay_seed(x, y, tail, amp), 1.0;
            break;
        }
    }
    return p;
}

// gauge fixes that do not change the curve
void normalize_params(FitModelKind kind, Eigen::VectorXd& p) {
    auto wrap_angle = [](double a) {
        while (a > pi) a -= 2.0 * pi;
        while (a <= -pi) a += 2.0 * pi;
        return a;
    };
    switch (kind) {
        case FitModelKind::lorentzian:
            p(3) = std::abs(p(3));
            break;
        case FitModelKind::double_lorentzian:
            p(3) = std::abs(p(3));
            p(6) = std::abs(p(6));
            break;
        case FitModelKind::damped_cosine:
            if (p(3) < 0.0) {
                p(3) = -p(3);
                p(4) = -p(4);
            }
            if (p(1) < 0.0) {
                p(1) = -p(1);
                p(4) += pi;
            }
            p(4) = wrap_angle(p(4));
            break;
        default:
            break;
    }
}

bool params_physical(FitModelKind kind, const Eigen::VectorXd& p) {
    switch (kind) {
        case FitModelKind::lorentzian: return p(3) > 0.0;
        case FitModelKind::double_lorentzian: return p(3) > 0.0 && p(6) > 0.0;
        case FitModelKind::exp_decay: return p(2) > 0.0;
        case FitModelKind::damped_cosine: return p(2) > 0.0 && p(3) >= 0.0;
        case FitModelKind::stretched_exp: return p(2) > 0.0 && p(3) > 0.0;
    }
    return false;
}

double sse(FitModelKind kind, const Eigen::VectorXd& p, const std::vector<double>& x,
           const std::vector<double>& y) {
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = evaluate_model(kind, p, x[i]) - y[i];
        acc += r * r;
    }
    return acc;
}

}  // namespace

FitResult fit_curve(FitModelKind kind, const std::vector<double>& x,
                    const std::vector<double>& y, const std::optional<Eigen::VectorXd>& init) {
    const int k = parameter_count(kind);
    const int n = static_cast<int>(x.size());
    if (y.size() != x.size()) throw std::invalid_argument("fit_curve: x/y length mismatch");
    if (n < k + 2) throw std::invalid_argument("fit_curve: need at least 2 + parameter-count points");
    for (int i = 1; i < n; ++i)
        if (x[i] <= x[i - 1])
            throw std::invalid_argument("fit_curve: x must be strictly increasing");
    const double ymin = *std::min_element(y.begin(), y.end());
    const double ymax = *std::max_element(y.begin(), y.end());
    if (ymax - ymin == 0.0) throw std::invalid_argument("fit_curve: degenerate data (zero variance)");

    Eigen::VectorXd p = init ? *init : initial_guess(kind, x, y);
    if (p.size() != k) throw std::invalid_argument("fit_curve: wrong initial parameter count");

    constexpr int max_iter = 200;
    constexpr double grad_tol = 1e-10;
    double lambda = 1e-3;
    double current_sse = sse(kind, p, x, y);
    bool converged = false;
    int iter = 0;

    for (; iter < max_iter; ++iter) {
        const Eigen::MatrixXd j = jacobian(kind, p, x);
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r(i) = evaluate_model(kind, p, x[i]) - y[i];
        const Eigen::VectorXd grad = j.transpose() * r;
        if (grad.cwiseAbs().maxCoeff() <= grad_tol * (1.0 + current_sse)) {
            converged = true;
            break;
        }
        const Eigen::MatrixXd jtj = j.transpose() * j;
        Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-30);

        Eigen::MatrixXd a = jtj;
        a.diagonal() += lambda * diag;
        const Eigen::VectorXd step = a.ldlt().solve(-grad);
        if (!step.allFinite()) {
            lambda *= 10.0;
            continue;
        }
        const Eigen::VectorXd p_try = p + step;
        const double try_sse = sse(kind, p_try, x, y);
        if (std::isfinite(try_sse) && try_sse < current_sse) {
            const double rel_step = step.norm() / (p.norm() + 1e-300);
            p = p_try;
            current_sse = try_sse;
            lambda = std::max(lambda / 10.0, 1e-14);
            if (rel_step < 1e-14) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e14) break;  // stalled
        }
    }

    normalize_params(kind, p);
    if (!params_physical(kind, p)) converged = false;

    FitResult result;
    result.kind = kind;
    result.params = p;
    result.converged = converged;
    result.iterations = iter;
    result.residual_rms = std::sqrt(current_sse / n);

    // one-sigma parameter uncertainties from the Jacobian at the optimum
    const Eigen::MatrixXd j = jacobian(kind, p, x);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const double variance = n > k ? current_sse / (n - k) : 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jtj, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    const Eigen::MatrixXd cov = variance * svd.solve(Eigen::MatrixXd::Identity(k, k));
    result.sigmas = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return result;
}

std::vector<double> fwhm(const FitResult& fit) {
    if (!fit.converged) throw std::invalid_argument("fwhm: fit did not converge");
    if (fit.kind == FitModelKind::lorentzian) return {2.0 * fit.params(3)};
    if (fit.kind == FitModelKind::double_lorentzian)
        return {2.0 * fit.params(3), 2.0 * fit.params(6)};
    throw std::invalid_argument("fwhm: fit model has no Lorentzian linewidth");
}

RabiFit extract_rabi(const Trace& trace) {
    trace.validate();
    RabiFit out;
    try {
        const FitResult fit = fit_curve(FitModelKind::damped_cosine, trace.x, trace.y);
        out.omega_hz = fit.params(3);
        out.decay_s = fit.params(2);
        out.converged = fit.converged;
    } catch (const std::invalid_argument&) {
        out.converged = false;
    }
    return out;
}

std::string to_string(FitModelKind kind) {
    switch (kind) {
        case FitModelKind::lorentzian: return "lorentzian";
        case FitModelKind::double_lorentzian: return "double_lorentzian";
        case FitModelKind::exp_decay: return "exp_decay";
        case FitModelKind::damped_cosine: return "damped_cosine";
        case FitModelKind::stretched_exp: return "stretched_exp";
    }
    return "unknown";
}

FitModelKind fit_model_from_string(const std::string& name) {
    if (name == "lorentzian") return FitModelKind::lorentzian;
    if (name == "double_lorentzian") return FitModelKind::double_lorentzian;
    if (name == "exp_decay") return FitModelKind::exp_decay;
    if (name == "damped_cosine") return FitModelKind::damped_cosine;
    if (name == "stretched_exp") return FitModelKind::stretched_exp;
    throw std::invalid_argument("unknown fit model: " + name);
}

}  // namespace sicmag

#include "qrps/bosonic.hpp"

#include <cmath>
#include <functional>

namespace qrps::bosonic {

namespace {

// Golden-section maximum over [a, b]; on exactly equal probe values the
// right boundary shrinks, so a constant objective converges to the left
// endpoint. Returns the final interval midpoint.
double golden_section_max(const std::function<double(double)>& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

DpcOptimum maximize_on_unit_interval(const std::function<double(double)>& f, double tol) {
    const double t_in = golden_section_max(f, 0.0, 1.0, tol);
    // Leftmost-maximizer convention: prefer an endpoint whenever it is not
    // strictly beaten by the interior point.
    double best_t = t_in;
    double best_v = f(t_in);
    const double f1 = f(1.0);
    if (f1 >= best_v) {
        best_t = 1.0;
        best_v = f1;
    }
    const double f0 = f(0.0);
    if (f0 >= best_v) {
        best_t = 0.0;
        best_v = f0;
    }
    DpcOptimum opt;
    opt.t_max = best_t;
    opt.rate = best_v;
    opt.at_boundary = (best_t <= tol || best_t >= 1.0 - tol);
    return opt;
}

}  // namespace

void validate(const BosonicParams& p) {
    if (!(p.n_a >= 0.0) || !(p.n_s >= 0.0) || !(p.n_e >= 0.0))
        throw std::invalid_argument("bosonic: photon numbers must be finite and non-negative");
    if (!(p.eta >= 0.0 && p.eta <= 1.0)) throw std::invalid_argument("bosonic: eta out of [0,1]");
    if (!std::isfinite(p.n_a) || !std::isfinite(p.n_s) || !std::isfinite(p.n_e))
        throw std::invalid_argument("bosonic: photon numbers must be finite");
}

void validate(const AmplifierParams& a) {
    if (!(a.kappa > 1.0)) throw std::invalid_argument("amplifier: gain must exceed 1");
    if (!(a.n_a >= 0.0) || !(a.n_s >= 0.0) || !(a.n_e >= 0.0))
        throw std::invalid_argument("amplifier: photon numbers must be non-negative");
}

double thermal_entropy(double n) {
    if (n < 0.0) throw std::invalid_argument("thermal_entropy: negative photon number");
    if (n == 0.0) return 0.0;
    return (n + 1.0) * std::log2(n + 1.0) - n * std::log2(n);
}

namespace {

// Shared three-term expression with the loss/gain factors already applied:
// g(sig) - g(cond) - log2((N_A + t^2 N_S) / N_A).
double dpc_core(double t, double n_a, double n_s, double noise_gain, double sig_gain, double floor_term) {
    if (n_a == 0.0) {
        if (n_s > 0.0 && t != 0.0)
            throw std::invalid_argument("dpc_rate: N_A = 0 with N_S > 0 requires t = 0");
        // Limiting value: conditional variance -> N_S, penalty -> 0.
        const double sig = sig_gain * (n_a + n_s) + floor_term;
        const double cond = noise_gain * n_s + floor_term;
        return thermal_entropy(sig) - thermal_entropy(cond);
    }
    const double denom = n_a + t * t * n_s;
    const double cond_var = (1.0 - t) * (1.0 - t) * n_a * n_s / denom;
    const double sig = sig_gain * (n_a + n_s) + floor_term;
    const double cond = noise_gain * cond_var + floor_term;
    return thermal_entropy(sig) - thermal_entropy(cond) - std::log2(denom / n_a);
}

}  // namespace

double dpc_rate(double t, const BosonicParams& p) {
    validate(p);
    return dpc_core(t, p.n_a, p.n_s, p.eta, p.eta, (1.0 - p.eta) * p.n_e);
}

DpcOptimum optimize_dpc_coefficient(const BosonicParams& p, double tol) {
    validate(p);
    return maximize_on_unit_interval([&p](double t) { return dpc_rate(t, p); }, tol);
}

double homodyne_capacity(const BosonicParams& p) {
    validate(p);
    return 0.5 * std::log2(1.0 + 4.0 * p.eta * p.n_a / (2.0 * (1.0 - p.eta) * p.n_e + 1.0));
}

double heterodyne_capacity(const BosonicParams& p) {
    validate(p);
    return std::log2(1.0 + p.eta * p.n_a / ((1.0 - p.eta) * p.n_e + 1.0));
}

DpcOptimum amplifier_dpc_bound(const AmplifierParams& a) {
    validate(a);
    auto bracket = [&a](double t) {
        return dpc_core(t, a.n_a, a.n_s, a.kappa, a.kappa, (a.kappa - 1.0) * a.n_e);
    };
    return maximize_on_unit_interval(bracket, 1e-6);
}

double costa_capacity(double power, double noise_var) {
    if (power < 0.0) throw std::invalid_argument("costa_capacity: negative power");
    if (noise_var <= 0.0) throw std::invalid_argument("costa_capacity: noise variance must be positive");
    return 0.5 * std::log2(1.0 + power / noise_var);
}

double mmse_coefficient(double power, double noise_var) {
    if (power < 0.0) throw std::invalid_argument("mmse_coefficient: negative power");
    if (noise_var < 0.0) throw std::invalid_argument("mmse_coefficient: negative noise variance");
    if (noise_var == 0.0) {
        if (power == 0.0) throw std::invalid_argument("mmse_coefficient: 0/0 undefined");
        return 1.0;  // sigma^2 -> 0 limit
    }
    return power / (power + noise_var);
}

}  // namespace qrps::bosonic

// Test-side oracles, independent of the library's computation paths:
// closed-form entropy expressions, classical mutual information from joint
// tables, and brute-force Holevo search over a Bloch-sphere grid.
#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "qrps/channels.hpp"
#include "qrps/qlinalg.hpp"
#include "qrps/rng.hpp"

namespace oracle {

inline double log2_safe(double x) { return std::log2(x); }

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

inline double entropy(const std::vector<double>& pmf) {
    double h = 0.0;
    for (double p : pmf)
        if (p > 1e-15) h -= p * std::log2(p);
    return h;
}

inline double binary_convolution(double a, double b) { return (1.0 - a) * b + a * (1.0 - b); }

// I(A;B) from an explicit joint table p[a][b].
inline double classical_mi(const std::vector<std::vector<double>>& joint) {
    std::vector<double> pa(joint.size(), 0.0), pb(joint[0].size(), 0.0);
    for (size_t a = 0; a < joint.size(); ++a)
        for (size_t b = 0; b < joint[a].size(); ++b) {
            pa[a] += joint[a][b];
            pb[b] += joint[a][b];
        }
    double mi = 0.0;
    for (size_t a = 0; a < joint.size(); ++a)
        for (size_t b = 0; b < joint[a].size(); ++b)
            if (joint[a][b] > 1e-15) mi += joint[a][b] * std::log2(joint[a][b] / (pa[a] * pb[b]));
    return mi;
}

inline std::vector<qrps::cxd> bloch_state(double theta, double phi) {
    return {std::cos(theta / 2.0),
            qrps::cxd(std::cos(phi), std::sin(phi)) * std::sin(theta / 2.0)};
}

// Brute-force Holevo quantity of a qubit channel over antipodal pure-state
// pairs with uniform priors, gridding the Bloch sphere at step_deg degrees.
inline double bloch_grid_holevo(const qrps::qlinalg::KrausChannel& ch, double step_deg) {
    using namespace qrps;
    const double deg = 3.14159265358979323846 / 180.0;
    double best = 0.0;
    for (double th = 0.0; th <= 180.0 + 1e-9; th += step_deg) {
        for (double ph = 0.0; ph < 360.0 - 1e-9; ph += step_deg) {
            const auto v0 = bloch_state(th * deg, ph * deg);
            const auto v1 = bloch_state((180.0 - th) * deg, (ph + 180.0) * deg);
            const CMat r0 = qlinalg::apply_channel_raw(ch, CMat::outer(v0, v0));
            const CMat r1 = qlinalg::apply_channel_raw(ch, CMat::outer(v1, v1));
            const CMat avg = (r0 + r1) * 0.5;
            const double holevo = qlinalg::entropy_of(avg) -
                                  0.5 * qlinalg::entropy_of(r0) - 0.5 * qlinalg::entropy_of(r1);
            best = std::max(best, holevo);
            if (th < 1e-9 || th > 180.0 - 1e-9) break;  // poles need one phi only
        }
    }
    return best;
}

// Random density operator from a random pure state mixed with noise.
inline qrps::CMat random_density(int dim, qrps::Rng& rng) {
    using namespace qrps;
    CMat g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cxd(rng.gaussian(), rng.gaussian());
    CMat rho = g * g.adjoint();
    const double tr = rho.trace().real();
    return rho * (1.0 / tr);
}

inline std::vector<qrps::cxd> random_pure(int dim, qrps::Rng& rng) {
    std::vector<qrps::cxd> v(dim);
    double n2 = 0.0;
    for (auto& a : v) {
        a = qrps::cxd(rng.gaussian(), rng.gaussian());
        n2 += std::norm(a);
    }
    for (auto& a : v) a /= std::sqrt(n2);
    return v;
}

}  // namespace oracle

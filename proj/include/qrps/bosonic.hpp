#pragma once

#include <stdexcept>

namespace qrps::bosonic {

// Single-mode lossy channel parameters: mean input photon number N_A,
// interference photon number N_S, environment photon number N_E, and
// transmissivity eta in [0, 1].
struct BosonicParams {
    double n_a = 0.0;
    double n_s = 0.0;
    double n_e = 0.0;
    double eta = 0.0;
};

struct AmplifierParams {
    double kappa = 0.0;  // gain, strictly > 1
    double n_a = 0.0;
    double n_s = 0.0;
    double n_e = 0.0;
};

struct DpcOptimum {
    double t_max = 0.0;
    double rate = 0.0;
    bool at_boundary = false;  // interior search landed on an endpoint of [0, 1]
};

// g(N) = (N+1) log2(N+1) - N log2(N); entropy of the thermal state, bits.
double thermal_entropy(double n);

// Dirty-paper rate at coefficient t (bits per mode). t may lie outside
// [0, 1] for plotting. With N_A = 0 the log penalty is defined as 0 at
// t = 0 and rejected otherwise.
double dpc_rate(double t, const BosonicParams& p);

// Golden-section maximization of dpc_rate over t in [0, 1], interval
// refined below tol; leftmost maximizer on ties.
DpcOptimum optimize_dpc_coefficient(const BosonicParams& p, double tol = 1e-6);

// (1/2) log2(1 + 4 eta N_A / (2 (1-eta) N_E + 1)); interference-free by
// dirty-paper cancellation.
double homodyne_capacity(const BosonicParams& p);

// log2(1 + eta N_A / ((1-eta) N_E + 1)).
double heterodyne_capacity(const BosonicParams& p);

// Thermal amplifier dirty-paper lower bound, maximized over t in [0, 1].
DpcOptimum amplifier_dpc_bound(const AmplifierParams& a);

// Classical baselines: C(W) = (1/2) log2(1 + P / sigma2), t = P / (P + sigma2).
double costa_capacity(double power, double noise_var);
double mmse_coefficient(double power, double noise_var);

void validate(const BosonicParams& p);
void validate(const AmplifierParams& a);

}  // namespace qrps::bosonic

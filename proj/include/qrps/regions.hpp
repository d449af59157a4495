#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrps/channels.hpp"
#include "qrps/qlinalg.hpp"

namespace qrps::regions {

using channels::DistortionFunction;
using channels::RandomParameterChannel;
using qlinalg::ClassicalQuantumState;
using qlinalg::KrausChannel;
using qlinalg::Povm;

enum class CsiMode { sc, causal, nc, none };

std::string to_string(CsiMode m);
CsiMode csi_mode_from_string(const std::string& s);

// One evaluation point of a region formula: the classical distributions,
// the pure input states, and (causal mode) the Shannon-strategy channels.
struct Strategy {
    CsiMode mode = CsiMode::none;
    int x_size = 0;
    int z_size = 1;

    std::vector<double> p_x;                            // sc / causal / none
    std::vector<std::vector<std::vector<double>>> p_z_given_xs;  // [x][s][z], sc / causal
    std::vector<std::vector<double>> p_x_given_s;       // [s][x], nc

    std::vector<std::vector<cxd>> input_states;         // |phi^x>, one per x
    // nc only: optional per-(x,s) states, indexed [x][s]; empty -> use input_states.
    std::vector<std::vector<std::vector<cxd>>> input_states_xs;

    std::vector<KrausChannel> shannon_strategies;       // F^(s), causal only

    void validate(const RandomParameterChannel& rpc) const;
};

// POVM family Gamma^{s_hat}_{B|x,z} plus the distortion it is scored by.
struct EstimationPovm {
    int x_size = 0;
    int z_size = 1;
    std::vector<Povm> gamma;  // indexed x * z_size + z; outcome labels name s_hat
    DistortionFunction distortion;

    const Povm& at(int x, int z) const { return gamma[static_cast<size_t>(x) * z_size + z]; }
};

struct RatePoint {
    double rate = 0.0;        // bits per channel use
    double distortion = 0.0;  // expected d units
    CsiMode mode = CsiMode::none;
    bool rate_clamped = false;    // raw value was negative
    bool povm_restricted = false; // estimation searched a restricted POVM family
    std::optional<Strategy> strategy;
};

struct RegionFrontier {
    CsiMode mode = CsiMode::none;
    int k = 1;
    uint64_t seed = 0;
    std::vector<double> grid;      // distortion targets, ascending
    std::vector<RatePoint> points; // one per grid entry, rate non-decreasing
};

struct OptimizerConfig {
    int starts = 32;           // multi-start count (canonical starts included)
    int max_cycles = 60;       // coordinate-ascent sweeps per start
    int x_size = 0;            // 0 = auto (min(dim^2, dim+2)); capped at dim^2 + 1
    int z_size = 0;            // 0 = auto (max(2, |S|)); capped at dim^2 + |S|
    double tol = 1e-7;         // minimum objective gain to accept a move
    int threads = 0;           // 0 = hardware concurrency (QRPS_THREADS caps)
};

// R = I(Z,X;B) - I(Z;S|X) on the cq-state rho_SZXB, distortion
// from the Gamma family; negative rates clamp to zero with a flag.
RatePoint evaluate_strategy_sc(const RandomParameterChannel& rpc, const Strategy& st,
                               const EstimationPovm& est);

// Same functionals on the virtual channel V^(s) = N^(s) o F^(s).
RatePoint evaluate_strategy_causal(const RandomParameterChannel& rpc, const Strategy& st,
                                   const EstimationPovm& est);

// R = I(X;B) - I(X;S) with x correlated to s.
RatePoint evaluate_strategy_nc(const RandomParameterChannel& rpc, const Strategy& st,
                               const EstimationPovm& est);

// R = I(X;B).
RatePoint evaluate_strategy_none(const RandomParameterChannel& rpc, const Strategy& st,
                                 const EstimationPovm& est);

RatePoint evaluate_strategy(const RandomParameterChannel& rpc, const Strategy& st,
                            const EstimationPovm& est);

// Weighted conditional-state family for one (x, z) context.
struct ConditionalContext {
    int x = 0;
    int z = 0;
    double weight = 0.0;                 // p(x, z)
    std::vector<double> posterior;       // p(s | x, z), one per parameter value
    std::vector<CMat> states;            // rho^{s,x}_B per parameter value
};

struct EstimationResult {
    EstimationPovm povm;
    double expected_distortion = 0.0;
    bool restricted = false;  // true when |s_hat| > 2 (Helstrom covers the binary case)
};

// Distortion-minimizing measurement per context: Helstrom for binary s_hat;
// otherwise the best of pairwise cost-difference eigenbases and the
// pretty-good measurement, each Bayes-relabeled.
EstimationResult optimal_estimation_povm(const std::vector<ConditionalContext>& contexts,
                                         const DistortionFunction& distortion, int x_size, int z_size);

// Conditional family induced by a strategy (shared by evaluation and sweep).
std::vector<ConditionalContext> conditional_family(const RandomParameterChannel& rpc,
                                                   const Strategy& st);

// Frontier sweep: for each D in the ascending grid, maximize the rate over
// strategies within the pure-state cardinality bounds by seeded multi-start
// coordinate ascent; the estimation POVM is refreshed via
// optimal_estimation_povm on every evaluation. k in {1, 2}.
RegionFrontier sweep_region(const RandomParameterChannel& rpc, const DistortionFunction& distortion,
                            CsiMode mode, const std::vector<double>& grid, const OptimizerConfig& cfg,
                            uint64_t seed, int k = 1);

namespace detail {

// Internals shared with the sweep; these skip structural re-validation.
std::vector<std::vector<CMat>> output_states(const RandomParameterChannel& rpc, const Strategy& st);
double fast_rate(const RandomParameterChannel& rpc, const Strategy& st,
                 const std::vector<std::vector<CMat>>& rho_sx);
double min_expected_distortion(const std::vector<ConditionalContext>& contexts,
                               const DistortionFunction& distortion);

}  // namespace detail

}  // namespace qrps::regions

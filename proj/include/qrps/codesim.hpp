#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qrps/channels.hpp"
#include "qrps/regions.hpp"
#include "qrps/rng.hpp"

namespace qrps::codesim {

using channels::DistortionFunction;
using channels::RandomParameterChannel;
using qlinalg::DensityOperator;
using regions::EstimationPovm;
using regions::Strategy;

// delta-typicality against a reference pmf over a flattened finite alphabet.
struct TypicalityConfig {
    double delta = 0.0;
    std::vector<double> pmf;
};

// True iff the empirical distribution sits within delta of the pmf on every
// positive-probability symbol and exactly avoids zero-probability symbols.
bool typical_set_test(const std::vector<int>& seq, const TypicalityConfig& cfg);

struct RateTriple {
    double r = 0.0;        // message rate R
    double r_s = 0.0;      // bin rate R_s
    double r_st = 0.0;     // covering rate R~_s (>= r_s)
};

// Block codebook with lazily generated entries: x^n(m, l) drawn i.i.d. from
// the x marginal, z^n(k | m, l) from p_{Z|X} conditioned on the x codeword.
// Entries are reproducible from (seed, block, indices); bins partition the
// k range into equal slices of size bin_size.
class Codebook {
public:
    Codebook(int n, const RateTriple& rates, std::vector<double> p_x,
             std::vector<std::vector<double>> p_z_given_x, uint64_t seed, uint64_t block_tag);

    int n() const { return n_; }
    uint64_t message_count() const { return m_count_; }
    uint64_t bin_count() const { return l_count_; }
    uint64_t cover_count() const { return k_count_; }
    uint64_t bin_size() const { return bin_size_; }
    uint64_t bin_of(uint64_t k) const { return k / bin_size_; }
    uint64_t bin_begin(uint64_t l) const { return l * bin_size_; }

    // Rates actually realized after integer rounding: log2(count) / n.
    RateTriple achieved_rates() const;

    std::vector<int> x_word(uint64_t m, uint64_t l) const;
    std::vector<int> z_word(uint64_t k, uint64_t m, uint64_t l) const;

    Rng x_stream(uint64_t m, uint64_t l) const;
    Rng z_stream(uint64_t k, uint64_t m, uint64_t l) const;
    const std::vector<double>& p_x() const { return p_x_; }
    const std::vector<double>& p_z_given_x(int x) const { return p_z_given_x_[x]; }

private:
    int n_;
    uint64_t m_count_, l_count_, k_count_, bin_size_;
    std::vector<double> p_x_;
    std::vector<std::vector<double>> p_z_given_x_;
    uint64_t seed_, block_tag_;
};

struct CoveringResult {
    uint64_t k = 0;
    bool failed = false;  // no typical candidate within the search budget; k = first index
};

// Smallest k with (s^n, z^n(k|m,l), x^n(m,l)) jointly delta-typical under
// cfg.pmf (flattened (s, x, z) alphabet); search capped at max_search
// lazily generated candidates.
CoveringResult covering_encode(const std::vector<int>& s_block, const Codebook& codebook, uint64_t m,
                               uint64_t ell_prev, const TypicalityConfig& cfg,
                               uint64_t max_search = (1ull << 20));

// Square-root measurement over candidate projectors. Pure candidates give
// rank-one projectors; mixed candidates contribute their eigenspaces with
// eigenvalue >= 0.01. Outcome -1 is the completion (error) outcome.
int sqrt_measurement_decoder(const std::vector<DensityOperator>& candidate_states,
                             const DensityOperator& received, Rng& rng);

// Success probability Tr(L rho) and trace distance to the post-measurement
// state sqrt(L) rho sqrt(L) / Tr(L rho).
std::pair<double, double> gentle_measurement_check(const DensityOperator& rho, const CMat& lambda);

struct SimReport {
    uint64_t trials = 0;
    double error_rate = 0.0;
    double avg_distortion = 0.0;
    double covering_failure_rate = 0.0;
    uint64_t seed = 0;
    RateTriple achieved;  // rates after integer rounding of the codebook
};

struct SimControls {
    double delta_cover = 0.04;
    double delta_decode = 0.10;
    uint64_t max_cover_search = (1ull << 20);
};

// Block-Markov scheme on a measurement channel: T blocks of n
// uses; block j+1 carries the bin index of block j's covering codeword.
// Decoding is classical joint typicality over outcome sequences.
SimReport simulate_block_markov_sc(const RandomParameterChannel& rpc, const Strategy& strategy,
                                   const EstimationPovm& est, int n, int T, const RateTriple& rates,
                                   uint64_t trials, uint64_t seed, const SimControls& ctl = {});

// Single-block Gelfand-Pinsker binning scheme (non-causal CSI).
SimReport simulate_binning_nc(const RandomParameterChannel& rpc, const Strategy& strategy,
                              const EstimationPovm& est, int n, const RateTriple& rates, uint64_t trials,
                              uint64_t seed, const SimControls& ctl = {});

}  // namespace qrps::codesim

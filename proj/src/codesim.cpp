#include "qrps/codesim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrps::codesim {

using channels::ChannelKind;
using qlinalg::apply_channel_raw;
using qlinalg::ValidationError;
using regions::CsiMode;

namespace {

// Substream path tags (root seed / tag / trial / block / ...).
constexpr uint64_t kParam = 11, kMessage = 12, kChannel = 13, kEstimate = 14;
constexpr uint64_t kCodeX = 15, kCodeZ = 16;

uint64_t count_from_rate(int n, double rate) {
    if (rate < 0.0) throw ValidationError("codebook: negative rate");
    const double bits = n * rate;
    if (bits >= 62.0) return 1ull << 62;
    return std::max<uint64_t>(1, static_cast<uint64_t>(std::floor(std::pow(2.0, bits))));
}

// Streaming delta-typicality: reject as soon as a zero-probability symbol
// appears or a cell count exceeds its ceiling.
class TypicalityChecker {
public:
    TypicalityChecker(const std::vector<double>& pmf, double delta, int n)
        : pmf_(pmf), delta_(delta), n_(n), counts_(pmf.size(), 0) {
        ceil_.resize(pmf.size());
        for (size_t a = 0; a < pmf.size(); ++a)
            ceil_[a] = (pmf[a] > 0.0) ? static_cast<int>(std::floor((pmf[a] + delta) * n)) : 0;
    }

    bool feed(int symbol) {
        if (pmf_[symbol] <= 0.0) return false;
        return ++counts_[symbol] <= ceil_[symbol];
    }

    bool finish() const {
        for (size_t a = 0; a < pmf_.size(); ++a) {
            if (pmf_[a] <= 0.0) continue;
            if (std::abs(static_cast<double>(counts_[a]) / n_ - pmf_[a]) > delta_) return false;
        }
        return true;
    }

private:
    const std::vector<double>& pmf_;
    double delta_;
    int n_;
    std::vector<int> counts_;
    std::vector<int> ceil_;
};

}  // namespace

bool typical_set_test(const std::vector<int>& seq, const TypicalityConfig& cfg) {
    if (cfg.delta <= 0.0) throw ValidationError("typicality: delta must be positive");
    std::vector<int> counts(cfg.pmf.size(), 0);
    for (int s : seq) {
        if (s < 0 || s >= static_cast<int>(cfg.pmf.size()))
            throw ValidationError("typicality: symbol outside the pmf alphabet");
        if (cfg.pmf[s] <= 0.0) return false;
        ++counts[s];
    }
    const double n = static_cast<double>(seq.size());
    for (size_t a = 0; a < cfg.pmf.size(); ++a) {
        if (cfg.pmf[a] <= 0.0) continue;
        if (std::abs(counts[a] / n - cfg.pmf[a]) > cfg.delta) return false;
    }
    return true;
}

Codebook::Codebook(int n, const RateTriple& rates, std::vector<double> p_x,
                   std::vector<std::vector<double>> p_z_given_x, uint64_t seed, uint64_t block_tag)
    : n_(n), p_x_(std::move(p_x)), p_z_given_x_(std::move(p_z_given_x)), seed_(seed), block_tag_(block_tag) {
    if (n <= 0) throw ValidationError("codebook: blocklength must be positive");
    if (rates.r_s > rates.r_st + 1e-12)
        throw ValidationError("codebook: rate triple violates R_s <= R~_s");
    m_count_ = count_from_rate(n, rates.r);
    l_count_ = count_from_rate(n, rates.r_s);
    bin_size_ = count_from_rate(n, rates.r_st - rates.r_s);
    k_count_ = l_count_ * bin_size_;  // bins partition [0, K) exactly
}

RateTriple Codebook::achieved_rates() const {
    RateTriple a;
    a.r = std::log2(static_cast<double>(m_count_)) / n_;
    a.r_s = std::log2(static_cast<double>(l_count_)) / n_;
    a.r_st = std::log2(static_cast<double>(k_count_)) / n_;
    return a;
}

Rng Codebook::x_stream(uint64_t m, uint64_t l) const {
    return substream(seed_, {kCodeX, block_tag_, m, l});
}

Rng Codebook::z_stream(uint64_t k, uint64_t m, uint64_t l) const {
    return substream(seed_, {kCodeZ, block_tag_, m, l, k});
}

std::vector<int> Codebook::x_word(uint64_t m, uint64_t l) const {
    Rng rng = x_stream(m, l);
    std::vector<int> w(n_);
    for (int i = 0; i < n_; ++i) w[i] = rng.sample(p_x_);
    return w;
}

std::vector<int> Codebook::z_word(uint64_t k, uint64_t m, uint64_t l) const {
    const std::vector<int> x = x_word(m, l);
    Rng rng = z_stream(k, m, l);
    std::vector<int> w(n_);
    for (int i = 0; i < n_; ++i) w[i] = rng.sample(p_z_given_x_[x[i]]);
    return w;
}

CoveringResult covering_encode(const std::vector<int>& s_block, const Codebook& codebook, uint64_t m,
                               uint64_t ell_prev, const TypicalityConfig& cfg, uint64_t max_search) {
    if (static_cast<int>(s_block.size()) != codebook.n())
        throw ValidationError("covering_encode: parameter block length mismatch");
    const std::vector<int> x = codebook.x_word(m, ell_prev);
    const int nz = static_cast<int>(codebook.p_z_given_x(0).size());
    const uint64_t limit = std::min(codebook.cover_count(), max_search);

    for (uint64_t k = 0; k < limit; ++k) {
        Rng rng = codebook.z_stream(k, m, ell_prev);
        TypicalityChecker chk(cfg.pmf, cfg.delta, codebook.n());
        bool alive = true;
        for (int i = 0; i < codebook.n() && alive; ++i) {
            const int z = rng.sample(codebook.p_z_given_x(x[i]));
            alive = chk.feed((s_block[i] * static_cast<int>(codebook.p_x().size()) + x[i]) * nz + z);
        }
        if (alive && chk.finish()) return {k, false};
    }
    return {0, true};  // "select k arbitrarily": index 0, flagged
}

int sqrt_measurement_decoder(const std::vector<DensityOperator>& candidate_states,
                             const DensityOperator& received, Rng& rng) {
    if (candidate_states.empty()) throw ValidationError("sqrt decoder: no candidates");
    const int dim = received.dim();
    if (dim > 4096) throw ValidationError("sqrt decoder: dimension guard (4096) exceeded");
    for (const auto& c : candidate_states)
        if (c.dim() != dim) throw ValidationError("sqrt decoder: candidate dimension mismatch");

    // Candidate projectors: eigenspaces with eigenvalue >= 0.01.
    std::vector<CMat> proj;
    CMat s_op(dim, dim);
    for (const auto& c : candidate_states) {
        const auto es = hermitian_eigensystem(c.mat());
        CMat p(dim, dim);
        for (int i = 0; i < dim; ++i) {
            if (es.values[i] < 0.01) continue;
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    p(a, b) += es.vectors(a, i) * std::conj(es.vectors(b, i));
        }
        s_op += p;
        proj.push_back(std::move(p));
    }
    const CMat inv_root =
        hermitian_function(s_op, [](double v) { return v > 1e-10 ? 1.0 / std::sqrt(v) : 0.0; });

    std::vector<double> probs;
    double total = 0.0;
    CMat povm_sum(dim, dim);
    for (const auto& p : proj) {
        const CMat el = inv_root * p * inv_root;
        povm_sum += el;
        const double pr = std::max(0.0, (el * received.mat()).trace().real());
        probs.push_back(pr);
        total += pr;
    }
    // Completed-set validity: the completion I - sum must be PSD so the
    // elements form a POVM within tolerance.
    {
        const auto completion_spectrum = hermitian_eigenvalues(CMat::identity(dim) - povm_sum);
        if (completion_spectrum.front() < -1e-8)
            throw ValidationError("sqrt decoder: completed element set exceeds identity");
    }
    const double p_err = std::max(0.0, 1.0 - total);
    probs.push_back(p_err);

    double norm = total + p_err;
    for (double& p : probs) p /= norm;
    const int outcome = rng.sample(probs);
    return outcome == static_cast<int>(candidate_states.size()) ? -1 : outcome;
}

std::pair<double, double> gentle_measurement_check(const DensityOperator& rho, const CMat& lambda) {
    const auto vals = hermitian_eigenvalues(lambda);
    if (vals.front() < -1e-9 || vals.back() > 1.0 + 1e-9)
        throw ValidationError("gentle measurement: operator outside [0, I]");
    const double succ = std::max(0.0, (lambda * rho.mat()).trace().real());
    if (succ < 1e-12) return {succ, 2.0};
    const CMat root = hermitian_function(lambda, [](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
    const CMat post = (root * rho.mat() * root) * (1.0 / succ);
    return {succ, trace_norm_diff(rho.mat(), post)};
}

namespace {

// Everything the per-trial loops need, precomputed as lookup tables.
struct SimTables {
    int ns = 0, nx = 0, nz = 0, ny = 0;
    std::vector<double> q;                                  // parameter pmf
    std::vector<std::vector<double>> p_x_s;                 // [s][x] (nc) or broadcast p_x
    std::vector<double> p_x_marginal;                       // codebook draw law
    std::vector<std::vector<std::vector<double>>> p_z_xs;   // [x][s][z]
    std::vector<std::vector<double>> p_z_x;                 // [x][z] marginal
    std::vector<std::vector<std::vector<double>>> p_y_xs;   // [x][s][y]
    std::vector<double> joint_sxz;                          // covering reference
    std::vector<double> joint_sx;                           // binning covering reference
    std::vector<double> joint_xy;                           // message-decode reference
    std::vector<double> joint_xzy;                          // in-bin decode reference
    std::vector<std::vector<std::vector<std::vector<double>>>> p_shat;  // [x][z][y][shat]
    int blind_shat = 0;
    std::vector<std::vector<double>> dist_table;            // d(s, shat)
};

SimTables build_tables(const RandomParameterChannel& rpc, const Strategy& st, const EstimationPovm& est) {
    if (rpc.kind() != ChannelKind::measurement)
        throw ValidationError(
            "simulation requires a measurement-kind channel: decoding is classical joint "
            "typicality over outcome sequences");
    SimTables t;
    t.ns = rpc.param_count();
    t.nx = st.x_size;
    t.nz = (st.mode == CsiMode::sc || st.mode == CsiMode::causal) ? st.z_size : 1;
    t.ny = rpc.out_dim();
    t.q = rpc.q();

    const bool nc = (st.mode == CsiMode::nc);
    t.p_x_s.assign(t.ns, std::vector<double>(t.nx, 0.0));
    for (int s = 0; s < t.ns; ++s)
        for (int x = 0; x < t.nx; ++x) t.p_x_s[s][x] = nc ? st.p_x_given_s[s][x] : st.p_x[x];
    t.p_x_marginal.assign(t.nx, 0.0);
    for (int s = 0; s < t.ns; ++s)
        for (int x = 0; x < t.nx; ++x) t.p_x_marginal[x] += t.q[s] * t.p_x_s[s][x];

    t.p_z_xs.assign(t.nx, std::vector<std::vector<double>>(t.ns, std::vector<double>(t.nz, 1.0)));
    if (t.nz > 1)
        for (int x = 0; x < t.nx; ++x)
            for (int s = 0; s < t.ns; ++s) t.p_z_xs[x][s] = st.p_z_given_xs[x][s];
    t.p_z_x.assign(t.nx, std::vector<double>(t.nz, 0.0));
    for (int x = 0; x < t.nx; ++x)
        for (int s = 0; s < t.ns; ++s)
            for (int z = 0; z < t.nz; ++z) t.p_z_x[x][z] += t.q[s] * t.p_z_xs[x][s][z];

    // Channel outcome law per (x, s): diagonal of the q-c output.
    const bool per_xs_states = nc && !st.input_states_xs.empty();
    t.p_y_xs.assign(t.nx, std::vector<std::vector<double>>(t.ns, std::vector<double>(t.ny, 0.0)));
    for (int x = 0; x < t.nx; ++x) {
        for (int s = 0; s < t.ns; ++s) {
            const auto& vec = per_xs_states ? st.input_states_xs[x][s] : st.input_states[x];
            const CMat out = apply_channel_raw(rpc.map(s), CMat::outer(vec, vec));
            for (int y = 0; y < t.ny; ++y) t.p_y_xs[x][s][y] = std::max(0.0, out(y, y).real());
        }
    }

    // Reference joints (flattened as documented per use site).
    t.joint_sxz.assign(static_cast<size_t>(t.ns) * t.nx * t.nz, 0.0);
    t.joint_sx.assign(static_cast<size_t>(t.ns) * t.nx, 0.0);
    t.joint_xy.assign(static_cast<size_t>(t.nx) * t.ny, 0.0);
    t.joint_xzy.assign(static_cast<size_t>(t.nx) * t.nz * t.ny, 0.0);
    for (int s = 0; s < t.ns; ++s)
        for (int x = 0; x < t.nx; ++x) {
            const double psx = t.q[s] * t.p_x_s[s][x];
            t.joint_sx[s * t.nx + x] += psx;
            for (int z = 0; z < t.nz; ++z) {
                // Covering draws x ~ marginal and z | x, independent of s.
                const double cover = t.q[s] * t.p_x_marginal[x] * t.p_z_xs[x][s][z];
                t.joint_sxz[(s * t.nx + x) * t.nz + z] += cover;
                for (int y = 0; y < t.ny; ++y)
                    t.joint_xzy[(x * t.nz + z) * t.ny + y] +=
                        t.q[s] * t.p_x_marginal[x] * t.p_z_xs[x][s][z] * t.p_y_xs[x][s][y];
            }
            for (int y = 0; y < t.ny; ++y)
                t.joint_xy[x * t.ny + y] += t.q[s] * t.p_x_marginal[x] * t.p_y_xs[x][s][y];
        }

    t.dist_table.assign(t.ns, std::vector<double>(est.distortion.s_hat_count(), 0.0));
    for (int s = 0; s < t.ns; ++s)
        for (int sh = 0; sh < est.distortion.s_hat_count(); ++sh) t.dist_table[s][sh] = est.distortion(s, sh);

    t.p_shat.assign(t.nx, std::vector<std::vector<std::vector<double>>>(
                              t.nz, std::vector<std::vector<double>>(
                                        t.ny, std::vector<double>(est.distortion.s_hat_count(), 0.0))));
    for (int x = 0; x < t.nx; ++x)
        for (int z = 0; z < t.nz; ++z) {
            const auto& povm = est.at(x, z);
            for (int y = 0; y < t.ny; ++y) {
                double tot = 0.0;
                for (size_t sh = 0; sh < povm.outcomes().size(); ++sh) {
                    const double p = std::max(0.0, povm.outcomes()[sh].op(y, y).real());
                    t.p_shat[x][z][y][sh] = p;
                    tot += p;
                }
                for (auto& p : t.p_shat[x][z][y]) p /= (tot > 0.0 ? tot : 1.0);
            }
        }

    int best = 0;
    double best_cost = 0.0;
    for (int sh = 0; sh < est.distortion.s_hat_count(); ++sh) {
        double c = 0.0;
        for (int s = 0; s < t.ns; ++s) c += t.q[s] * t.dist_table[s][sh];
        if (sh == 0 || c < best_cost) {
            best = sh;
            best_cost = c;
        }
    }
    t.blind_shat = best;
    return t;
}

// Lazy lexicographic search for the smallest (m, l) whose x codeword is
// jointly typical with y; falls back to (0, 0) when nothing passes.
std::pair<uint64_t, uint64_t> decode_message(const Codebook& book, const std::vector<int>& y,
                                             const std::vector<double>& joint_xy, int ny, double delta) {
    const int n = book.n();
    for (uint64_t m = 0; m < book.message_count(); ++m) {
        for (uint64_t l = 0; l < book.bin_count(); ++l) {
            Rng rng = book.x_stream(m, l);
            TypicalityChecker chk(joint_xy, delta, n);
            bool alive = true;
            for (int i = 0; i < n && alive; ++i) {
                const int x = rng.sample(book.p_x());
                alive = chk.feed(x * ny + y[i]);
            }
            if (alive && chk.finish()) return {m, l};
        }
    }
    return {0, 0};
}

}  // namespace

SimReport simulate_block_markov_sc(const RandomParameterChannel& rpc0, const Strategy& strategy,
                                   const EstimationPovm& est, int n, int T, const RateTriple& rates,
                                   uint64_t trials, uint64_t seed, const SimControls& ctl) {
    if (trials == 0) throw ValidationError("simulate: trials must be positive");
    if (n <= 0 || T <= 0 || static_cast<long long>(n) * T > 10000)
        throw ValidationError("simulate: n*T must lie in (0, 10^4]");

    // A causal strategy runs the strictly-causal scheme on the virtual
    // channel V^(s) = N^(s) o F^(s).
    RandomParameterChannel rpc = rpc0;
    Strategy st = strategy;
    if (st.mode == CsiMode::causal) {
        rpc = channels::compose_with_strategies(rpc0, st.shannon_strategies);
        st.mode = CsiMode::sc;
        st.shannon_strategies.clear();
    }
    if (st.mode != CsiMode::sc) throw ValidationError("simulate_block_markov_sc: sc or causal strategy required");
    st.validate(rpc);
    const SimTables t = build_tables(rpc, st, est);

    {
        Codebook probe(n, rates, t.p_x_marginal, t.p_z_x, seed, 0);
        if (probe.message_count() * probe.bin_count() > (1ull << 24))
            throw ValidationError("simulate: message/bin codebook too large for typicality decoding");
    }

    SimReport rep;
    rep.trials = trials;
    rep.seed = seed;

    uint64_t errors = 0, cover_attempts = 0, cover_failures = 0;
    double dist_sum = 0.0;

    TypicalityConfig cover_cfg{ctl.delta_cover, t.joint_sxz};

    for (uint64_t trial = 0; trial < trials; ++trial) {
        // Per-block data.
        std::vector<std::vector<int>> s_blk(T), y_blk(T);
        std::vector<uint64_t> m_true(T), l_true(T + 1, 0), k_true(T, 0);
        std::vector<Codebook> books;
        books.reserve(T);
        for (int j = 0; j < T; ++j)
            books.emplace_back(n, rates, t.p_x_marginal, t.p_z_x, seed, mix_seed(trial, j));

        Rng msg_rng = substream(seed, {kMessage, trial});
        for (int j = 0; j < T; ++j)
            m_true[j] = msg_rng.next_u64() % books[j].message_count();

        bool trial_error = false;

        for (int j = 0; j < T; ++j) {
            Rng prm = substream(seed, {kParam, trial, static_cast<uint64_t>(j)});
            s_blk[j].resize(n);
            for (int i = 0; i < n; ++i) s_blk[j][i] = prm.sample(t.q);

            // Transmit block j with x^n(m_j, l_{j-1}).
            Rng xgen = books[j].x_stream(m_true[j], l_true[j]);
            Rng ch = substream(seed, {kChannel, trial, static_cast<uint64_t>(j)});
            y_blk[j].resize(n);
            for (int i = 0; i < n; ++i) {
                const int x = xgen.sample(books[j].p_x());
                y_blk[j][i] = ch.sample(t.p_y_xs[x][s_blk[j][i]]);
            }

            // End of block j: cover s^n_j for forwarding in block j+1.
            if (j + 1 < T) {
                ++cover_attempts;
                const CoveringResult cr =
                    covering_encode(s_blk[j], books[j], m_true[j], l_true[j], cover_cfg, ctl.max_cover_search);
                if (cr.failed) ++cover_failures;
                k_true[j] = cr.k;
                l_true[j + 1] = books[j].bin_of(cr.k);
            }
        }

        // Decode every block's (m, l) pair, then the in-bin cover indices.
        std::vector<uint64_t> m_hat(T), l_hat(T + 1, 0);
        for (int j = 0; j < T; ++j) {
            const auto [m, l] = decode_message(books[j], y_blk[j], t.joint_xy, t.ny, ctl.delta_decode);
            m_hat[j] = m;
            l_hat[j] = l;
            if (m != m_true[j] || l != l_true[j]) trial_error = true;
        }

        for (int j = 0; j + 1 < T; ++j) {
            // l_{j+1} decoded from block j+1 names the bin of k_j.
            const uint64_t bin = l_hat[j + 1];
            uint64_t k_hat = books[j].bin_begin(bin);
            if (books[j].bin_size() > 1) {
                // Joint typicality of (x, z, y) inside the bin, smallest wins.
                const std::vector<int> x = books[j].x_word(m_hat[j], l_hat[j]);
                bool found = false;
                for (uint64_t k = books[j].bin_begin(bin);
                     k < books[j].bin_begin(bin) + books[j].bin_size() && !found; ++k) {
                    Rng zg = books[j].z_stream(k, m_hat[j], l_hat[j]);
                    TypicalityChecker chk(t.joint_xzy, ctl.delta_decode, n);
                    bool alive = true;
                    for (int i = 0; i < n && alive; ++i) {
                        const int z = zg.sample(t.p_z_x[x[i]]);
                        alive = chk.feed((x[i] * t.nz + z) * t.ny + y_blk[j][i]);
                    }
                    if (alive && chk.finish()) {
                        k_hat = k;
                        found = true;
                    }
                }
            }
            if (k_hat != k_true[j]) trial_error = true;

            // Reconstruct block j from (x, z(k_hat), y).
            const std::vector<int> x = books[j].x_word(m_hat[j], l_hat[j]);
            const std::vector<int> z = books[j].z_word(k_hat, m_hat[j], l_hat[j]);
            Rng est_rng = substream(seed, {kEstimate, trial, static_cast<uint64_t>(j)});
            for (int i = 0; i < n; ++i) {
                const int sh = est_rng.sample(t.p_shat[x[i]][z[i]][y_blk[j][i]]);
                dist_sum += t.dist_table[s_blk[j][i]][sh];
            }
        }
        // Final block: no cover index ever arrives; blind Bayes guess.
        for (int i = 0; i < n; ++i) dist_sum += t.dist_table[s_blk[T - 1][i]][t.blind_shat];

        if (trial_error) ++errors;
    }

    rep.error_rate = static_cast<double>(errors) / trials;
    rep.avg_distortion = dist_sum / (static_cast<double>(trials) * T * n);
    rep.covering_failure_rate =
        cover_attempts ? static_cast<double>(cover_failures) / cover_attempts : 0.0;
    Codebook ref(n, rates, t.p_x_marginal, t.p_z_x, seed, 0);
    rep.achieved = ref.achieved_rates();
    return rep;
}

SimReport simulate_binning_nc(const RandomParameterChannel& rpc, const Strategy& strategy,
                              const EstimationPovm& est, int n, const RateTriple& rates, uint64_t trials,
                              uint64_t seed, const SimControls& ctl) {
    if (trials == 0) throw ValidationError("simulate: trials must be positive");
    if (n <= 0 || n > 10000) throw ValidationError("simulate: n must lie in (0, 10^4]");
    if (strategy.mode != CsiMode::nc) throw ValidationError("simulate_binning_nc: nc strategy required");
    strategy.validate(rpc);
    const SimTables t = build_tables(rpc, strategy, est);

    // The binning codebook is x^n(m, l) with l in [1 : 2^{n R~_s}]; the
    // Codebook's bin slot plays that role (bin size 1, k unused).
    RateTriple book_rates{rates.r, rates.r_st, rates.r_st};

    SimReport rep;
    rep.trials = trials;
    rep.seed = seed;

    uint64_t errors = 0, cover_failures = 0;
    double dist_sum = 0.0;

    {
        Codebook probe(n, book_rates, t.p_x_marginal, t.p_z_x, seed, 0);
        if (probe.message_count() * probe.bin_count() > (1ull << 24))
            throw ValidationError("simulate: message/bin codebook too large for typicality decoding");
    }

    for (uint64_t trial = 0; trial < trials; ++trial) {
        Codebook book(n, book_rates, t.p_x_marginal, t.p_z_x, seed, mix_seed(trial, 0));

        Rng prm = substream(seed, {kParam, trial, 0});
        std::vector<int> s_seq(n);
        for (int i = 0; i < n; ++i) s_seq[i] = prm.sample(t.q);

        Rng msg_rng = substream(seed, {kMessage, trial});
        const uint64_t m = msg_rng.next_u64() % book.message_count();

        // Encoding: smallest l with (s^n, x^n(m, l)) jointly typical.
        uint64_t l = 0;
        bool found = false;
        const uint64_t limit = std::min(book.bin_count(), ctl.max_cover_search);
        for (uint64_t cand = 0; cand < limit && !found; ++cand) {
            Rng xg = book.x_stream(m, cand);
            TypicalityChecker chk(t.joint_sx, ctl.delta_cover, n);
            bool alive = true;
            for (int i = 0; i < n && alive; ++i) {
                const int x = xg.sample(book.p_x());
                alive = chk.feed(s_seq[i] * t.nx + x);
            }
            if (alive && chk.finish()) {
                l = cand;
                found = true;
            }
        }
        if (!found) ++cover_failures;

        Rng xgen = book.x_stream(m, l);
        Rng ch = substream(seed, {kChannel, trial, 0});
        std::vector<int> x_seq(n), y_seq(n);
        for (int i = 0; i < n; ++i) {
            x_seq[i] = xgen.sample(book.p_x());
            y_seq[i] = ch.sample(t.p_y_xs[x_seq[i]][s_seq[i]]);
        }

        const auto [m_hat, l_hat] = decode_message(book, y_seq, t.joint_xy, t.ny, ctl.delta_decode);
        if (m_hat != m || l_hat != l) ++errors;

        const std::vector<int> x_dec = book.x_word(m_hat, l_hat);
        Rng est_rng = substream(seed, {kEstimate, trial, 0});
        for (int i = 0; i < n; ++i) {
            const int sh = est_rng.sample(t.p_shat[x_dec[i]][0][y_seq[i]]);
            dist_sum += t.dist_table[s_seq[i]][sh];
        }
    }

    rep.error_rate = static_cast<double>(errors) / trials;
    rep.avg_distortion = dist_sum / (static_cast<double>(trials) * n);
    rep.covering_failure_rate = static_cast<double>(cover_failures) / trials;
    Codebook ref(n, book_rates, t.p_x_marginal, t.p_z_x, seed, 0);
    rep.achieved = ref.achieved_rates();
    rep.achieved.r_s = 0.0;  // single-block scheme has no bin rate
    return rep;
}

}  // namespace qrps::codesim
